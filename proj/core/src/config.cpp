#include "smoothsgd/config.hpp"

#include <cmath>
#include <fstream>
#include <type_traits>
#include <sstream>

#include "json.hpp"

namespace smoothsgd {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& j, const char* key, T& field) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
    if (it->is_number_unsigned()) {
      field = it->get<T>();
      return;
    }
    // Accept integral floats such as 1e4.
    if (it->is_number_float()) {
      const double v = it->get<double>();
      if (v >= 0.0 && v == std::floor(v) && v <= 9.007199254740992e15) {
        field = static_cast<T>(v);
        return;
      }
    }
    throw ConfigError(std::string(key) + ": expected a non-negative integer");
  } else {
    field = it->get<T>();
  }
}

Point read_bound(const json& j) {
  if (j.is_number()) return Point{j.get<double>()};
  return j.get<Point>();
}

void read_box(const json& j, const char* key, Box& box) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (it->is_array() && it->size() == 2 && (*it)[0].is_number()) {
    box.lo = Point{(*it)[0].get<double>()};
    box.hi = Point{(*it)[1].get<double>()};
    return;
  }
  box.lo = read_bound(it->at("lo"));
  box.hi = read_bound(it->at("hi"));
}

json box_json(const Box& box) { return json{{"lo", box.lo}, {"hi", box.hi}}; }

NoiseKind read_kind(const json& j, const char* key, NoiseKind fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  const auto name = it->get<std::string>();
  auto kind = parse_noise_kind(name);
  if (!kind) throw ConfigError("unknown noise kind '" + name + "'");
  return *kind;
}

KernelSpec read_kernel(const json& j, KernelSpec k) {
  k.kind = read_kind(j, "kind", k.kind);
  read(j, "radius", k.radius);
  return k;
}

json kernel_json(const KernelSpec& k) {
  return json{{"kind", std::string(to_string(k.kind))}, {"radius", k.radius}};
}

GridSpec read_grid(const json& j, GridSpec g) {
  read(j, "lo", g.lo);
  read(j, "hi", g.hi);
  read(j, "points", g.points);
  return g;
}

json grid_json(const GridSpec& g) {
  return json{{"lo", g.lo}, {"hi", g.hi}, {"points", g.points}};
}

// Expands a one-element bound to `d` coordinates.
void expand(Point& p, std::size_t d, const char* what) {
  if (p.size() == 1 && d > 1) p.assign(d, p.front());
  if (p.size() != d) {
    throw ConfigError(std::string(what) + ": expected " + std::to_string(d) + " coordinates, got " +
                      std::to_string(p.size()));
  }
}

void expand_box(Box& box, std::size_t d, double lo, double hi, const char* what) {
  if (box.lo.empty() && box.hi.empty()) {
    box = Box::cube(d, lo, hi);
    return;
  }
  expand(box.lo, d, what);
  expand(box.hi, d, what);
  for (std::size_t i = 0; i < d; ++i) {
    if (!(box.lo[i] < box.hi[i])) throw ConfigError(std::string(what) + ": lo must be < hi");
  }
}

void check_grid(const GridSpec& g, const char* what) {
  if (!(g.lo < g.hi) || g.points < 1) {
    throw ConfigError(std::string(what) + ": need lo < hi and points >= 1");
  }
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

Objective ObjectiveSpec::build() const {
  Objective obj = [&] {
    if (kind == "spiky") return make_spiky(SpikyParams{quad, amp, freq, dimension});
    if (kind == "quadratic") {
      return make_quadratic(dimension, center.empty() ? Point(dimension, 0.0) : center);
    }
    throw ConfigError("unknown objective kind '" + kind + "'");
  }();
  if (!domain.lo.empty()) obj = obj.with_domain(domain);
  return obj;
}

void validate(ExperimentConfig& c) {
  auto& o = c.objective;
  check(o.kind == "spiky" || o.kind == "quadratic", "objective.kind must be spiky or quadratic");
  check(o.dimension >= 1, "objective.dimension must be >= 1");
  const std::size_t d = o.dimension;
  if (o.kind == "spiky") {
    check(o.quad > 0.0 && o.freq > 0.0 && o.amp >= 0.0,
          "objective: spiky needs quad > 0, freq > 0, amp >= 0");
  } else if (!o.center.empty()) {
    expand(o.center, d, "objective.center");
  }
  expand_box(o.domain, d, -kDefaultDomainHalfWidth, kDefaultDomainHalfWidth, "objective.domain");
  expand_box(c.init_box, d, -kDefaultDomainHalfWidth, kDefaultDomainHalfWidth, "init_box");

  check(!c.stages.empty(), "stages: at least one stage required");
  for (const auto& s : c.stages) {
    check(s.eta > 0.0, "stages: eta must be > 0");
    check(s.steps >= 1, "stages: steps must be >= 1");
    check(s.kernel.radius >= 0.0, "stages: kernel radius must be >= 0");
  }
  check(c.trials >= 1, "trials must be >= 1");
  check(c.confidence > 0.0 && c.confidence < 1.0, "confidence must be in (0, 1)");
  check(c.samples >= 2, "samples must be >= 2");
  check(c.cluster_tol > 0.0, "cluster_tol must be > 0");
  check(c.histogram_bins >= 1, "histogram_bins must be >= 1");
  check_grid(c.grid, "grid");
  check_grid(c.smooth.grid, "smooth.grid");
  check(c.smooth.eta >= 0.0 && c.smooth.kernel.radius >= 0.0, "smooth: eta and radius must be >= 0");
  check(c.theory.c > 0.0 && c.theory.y0_dist2 >= 0.0, "theory: need c > 0 and y0_dist2 >= 0");

  const auto& cal = c.calibration;
  check(cal.c_min > 0.0, "calibration.c_min must be > 0");
  check(cal.width_step > 0.0 && cal.width_lo >= 0.0 && cal.width_count >= 1,
        "calibration: need width_lo >= 0, width_step > 0, width_count >= 1");
  check(cal.samples >= 2, "calibration.samples must be >= 2");
  for (std::size_t i = 0; i < cal.screen_samples.size(); ++i) {
    check(cal.screen_samples[i] >= 2, "calibration.screen_samples must be >= 2");
    check(i == 0 || cal.screen_samples[i] > cal.screen_samples[i - 1],
          "calibration.screen_samples must be increasing");
  }

  const auto& f = c.figure3;
  check(f.eta > 0.0 && f.steps >= 1, "figure3: need eta > 0 and steps >= 1");
  check(f.levels.size() >= 3, "figure3: at least three noise levels required");
  for (double level : f.levels) check(level >= 0.0, "figure3: levels must be >= 0");
  check(f.stages.size() >= 2, "figure3: at least two shrink stages required");
  for (const auto& s : f.stages) {
    check(s.eta > 0.0 && s.steps >= 1 && s.level >= 0.0 && s.c > 0.0,
          "figure3.stages: need eta > 0, steps >= 1, level >= 0, c > 0");
  }
  check_grid(f.curve, "figure3.curve");
  check(f.curve_samples >= 1, "figure3.curve_samples must be >= 1");
}

ExperimentConfig parse_config(const std::string& json_text) {
  ExperimentConfig c;
  try {
    const json j = json::parse(json_text);
    if (auto it = j.find("objective"); it != j.end()) {
      auto& o = c.objective;
      read(*it, "kind", o.kind);
      read(*it, "dimension", o.dimension);
      read(*it, "quad", o.quad);
      read(*it, "amp", o.amp);
      read(*it, "freq", o.freq);
      if (auto ct = it->find("center"); ct != it->end()) o.center = read_bound(*ct);
      read_box(*it, "domain", o.domain);
    }
    if (auto it = j.find("stages"); it != j.end()) {
      c.stages.clear();
      for (const auto& s : *it) {
        StageSpec stage;
        read(s, "eta", stage.eta);
        read(s, "steps", stage.steps);
        if (auto k = s.find("kernel"); k != s.end()) stage.kernel = read_kernel(*k, stage.kernel);
        c.stages.push_back(stage);
      }
    }
    read(j, "trials", c.trials);
    read_box(j, "init_box", c.init_box);
    read(j, "seed", c.seed);
    read(j, "output", c.output);
    if (auto it = j.find("grid"); it != j.end()) c.grid = read_grid(*it, c.grid);
    read(j, "confidence", c.confidence);
    read(j, "samples", c.samples);
    read(j, "c_min", c.c_min);
    read(j, "cluster_tol", c.cluster_tol);
    read(j, "histogram_bins", c.histogram_bins);
    if (auto it = j.find("smooth"); it != j.end()) {
      if (auto g = it->find("grid"); g != it->end()) c.smooth.grid = read_grid(*g, c.smooth.grid);
      read(*it, "eta", c.smooth.eta);
      if (auto k = it->find("kernel"); k != it->end()) {
        c.smooth.kernel = read_kernel(*k, c.smooth.kernel);
      }
    }
    if (auto it = j.find("theory"); it != j.end()) {
      read(*it, "c", c.theory.c);
      read(*it, "y0_dist2", c.theory.y0_dist2);
      read(*it, "stay_steps", c.theory.stay_steps);
    }
    if (auto it = j.find("calibration"); it != j.end()) {
      auto& cal = c.calibration;
      read(*it, "c_min", cal.c_min);
      read(*it, "eta", cal.eta);
      cal.kind = read_kind(*it, "kind", cal.kind);
      read(*it, "width_lo", cal.width_lo);
      read(*it, "width_step", cal.width_step);
      read(*it, "width_count", cal.width_count);
      read(*it, "screen_samples", cal.screen_samples);
      read(*it, "samples", cal.samples);
    }
    if (auto it = j.find("figure3"); it != j.end()) {
      auto& f = c.figure3;
      f.kind = read_kind(*it, "kind", f.kind);
      read(*it, "eta", f.eta);
      read(*it, "steps", f.steps);
      read(*it, "levels", f.levels);
      if (auto st = it->find("stages"); st != it->end()) {
        f.stages.clear();
        for (const auto& s : *st) {
          Figure3Stage stage;
          read(s, "eta", stage.eta);
          read(s, "level", stage.level);
          read(s, "steps", stage.steps);
          read(s, "c", stage.c);
          f.stages.push_back(stage);
        }
      }
      if (auto g = it->find("curve"); g != it->end()) f.curve = read_grid(*g, f.curve);
      read(*it, "curve_samples", f.curve_samples);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  json stages = json::array();
  for (const auto& s : c.stages) {
    stages.push_back(json{{"eta", s.eta}, {"steps", s.steps}, {"kernel", kernel_json(s.kernel)}});
  }
  json f3_stages = json::array();
  for (const auto& s : c.figure3.stages) {
    f3_stages.push_back(json{{"eta", s.eta}, {"level", s.level}, {"steps", s.steps}, {"c", s.c}});
  }
  const auto& o = c.objective;
  json objective{{"kind", o.kind},  {"dimension", o.dimension}, {"quad", o.quad},
                 {"amp", o.amp},    {"freq", o.freq},           {"center", o.center},
                 {"domain", box_json(o.domain)}};
  const auto& cal = c.calibration;
  json j{
      {"objective", objective},
      {"stages", stages},
      {"trials", c.trials},
      {"init_box", box_json(c.init_box)},
      {"seed", c.seed},
      {"output", c.output},
      {"grid", grid_json(c.grid)},
      {"confidence", c.confidence},
      {"samples", c.samples},
      {"c_min", c.c_min},
      {"cluster_tol", c.cluster_tol},
      {"histogram_bins", c.histogram_bins},
      {"smooth",
       {{"grid", grid_json(c.smooth.grid)},
        {"eta", c.smooth.eta},
        {"kernel", kernel_json(c.smooth.kernel)}}},
      {"theory",
       {{"c", c.theory.c}, {"y0_dist2", c.theory.y0_dist2}, {"stay_steps", c.theory.stay_steps}}},
      {"calibration",
       {{"c_min", cal.c_min},
        {"eta", cal.eta},
        {"kind", std::string(to_string(cal.kind))},
        {"width_lo", cal.width_lo},
        {"width_step", cal.width_step},
        {"width_count", cal.width_count},
        {"screen_samples", cal.screen_samples},
        {"samples", cal.samples}}},
      {"figure3",
       {{"kind", std::string(to_string(c.figure3.kind))},
        {"eta", c.figure3.eta},
        {"steps", c.figure3.steps},
        {"levels", c.figure3.levels},
        {"stages", f3_stages},
        {"curve", grid_json(c.figure3.curve)},
        {"curve_samples", c.figure3.curve_samples}}},
  };
  return j.dump(2) + "\n";
}

StepSchedule build_schedule(const ExperimentConfig& config) {
  std::vector<Stage> stages;
  for (const auto& s : config.stages) {
    stages.push_back(Stage{s.eta, s.steps, s.kernel.build(config.objective.dimension)});
  }
  return StepSchedule(std::move(stages));
}

NoiseKernel level_kernel(NoiseKind kind, double level, double eta, std::size_t dimension) {
  if (level == 0.0) return NoiseKernel::zero(dimension);
  return NoiseKernel(kind, level / eta, dimension);
}

}  // namespace smoothsgd
