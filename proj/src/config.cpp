//
//  sgfs: free-surface semi-geostrophic flow in geostrophic coordinates,
//  via semi-discrete optimal transport and Hamiltonian particle dynamics.
//
//  Copyright 2026 the sgfs authors
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.
//
#include "sgfs/config.hpp"

#include <fstream>
#include <set>

namespace sgfs {

namespace {

using nlohmann::json;

// Tracks which keys of an object were consumed; leftovers are an error.
class Cursor {
 public:
  Cursor(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw ConfigError("expected an object at " + where());
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& get(const std::string& key) {
    if (!j_.contains(key))
      throw ConfigError("missing key '" + key + "' in " + where());
    used_.insert(key);
    return j_.at(key);
  }

  template <typename T>
  T value(const std::string& key) {
    const json& v = get(key);
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw ConfigError("bad value for key '" + key + "' in " + where());
    }
  }

  template <typename T>
  T value_or(const std::string& key, T fallback) {
    if (!j_.contains(key)) return fallback;
    return value<T>(key);
  }

  Cursor child(const std::string& key) {
    return Cursor(get(key), path_ + "." + key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key()))
        throw ConfigError("unknown key '" + it.key() + "' in " + where());
  }

  std::string where() const { return path_.empty() ? "config" : path_; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Vec3 vec3_of(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(what + " must be an array of three numbers");
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

void require_positive(double v, const std::string& key) {
  if (!(v > 0.0)) throw ConfigError("key '" + key + "' must be positive");
}

void require_count(int v, const std::string& key) {
  if (v < 1) throw ConfigError("key '" + key + "' must be >= 1");
}

}  // namespace

double RunConfig::resolved_smoothing() const {
  if (smoothing > 0.0) return smoothing;
  return 2.0 * std::min(base.dx() / base.qx, base.dy() / base.qy);
}

RunConfig parse_config(const nlohmann::json& j) {
  RunConfig cfg;
  Cursor root(j, "");

  {
    Cursor base = root.child("base");
    cfg.base.lx = base.value<double>("lx");
    cfg.base.ly = base.value<double>("ly");
    cfg.base.nx = base.value<int>("nx");
    cfg.base.ny = base.value<int>("ny");
    cfg.base.qx = base.value<int>("qx");
    cfg.base.qy = base.value<int>("qy");
    cfg.base.ox = base.value_or<double>("ox", 0.0);
    cfg.base.oy = base.value_or<double>("oy", 0.0);
    base.finish();
    cfg.base.validate();
  }

  {
    Cursor particles = root.child("particles");
    Cursor density = particles.child("density");
    const std::string kind = density.value<std::string>("kind");
    cfg.density.kind = DensitySpec::kind_from_string(kind);
    cfg.density.cell_average_m = density.value_or<int>("cell_average_m", 3);
    require_count(cfg.density.cell_average_m, "cell_average_m");
    switch (cfg.density.kind) {
      case DensitySpec::Kind::uniform_box: {
        cfg.density.box.lo = vec3_of(density.get("lo"), "particles.density.lo");
        cfg.density.box.hi = vec3_of(density.get("hi"), "particles.density.hi");
        break;
      }
      case DensitySpec::Kind::gaussian_blob: {
        cfg.density.centers[0] =
            vec3_of(density.get("center"), "particles.density.center");
        cfg.density.sigmas[0] = density.value<double>("sigma");
        require_positive(cfg.density.sigmas[0], "sigma");
        cfg.density.support_sigmas =
            density.value_or<double>("support_sigmas", 3.0);
        require_positive(cfg.density.support_sigmas, "support_sigmas");
        break;
      }
      case DensitySpec::Kind::two_blob: {
        const json& centers = density.get("centers");
        if (!centers.is_array() || centers.size() != 2)
          throw ConfigError("particles.density.centers needs two entries");
        cfg.density.centers[0] = vec3_of(centers.at(0), "centers[0]");
        cfg.density.centers[1] = vec3_of(centers.at(1), "centers[1]");
        const json& sigmas = density.get("sigmas");
        if (!sigmas.is_array() || sigmas.size() != 2)
          throw ConfigError("particles.density.sigmas needs two entries");
        cfg.density.sigmas[0] = sigmas.at(0).get<double>();
        cfg.density.sigmas[1] = sigmas.at(1).get<double>();
        require_positive(cfg.density.sigmas[0], "sigmas[0]");
        require_positive(cfg.density.sigmas[1], "sigmas[1]");
        const json& mix = density.get("mix");
        if (!mix.is_array() || mix.size() != 2)
          throw ConfigError("particles.density.mix needs two entries");
        cfg.density.mix[0] = mix.at(0).get<double>();
        cfg.density.mix[1] = mix.at(1).get<double>();
        require_positive(cfg.density.mix[0], "mix[0]");
        require_positive(cfg.density.mix[1], "mix[1]");
        cfg.density.support_sigmas =
            density.value_or<double>("support_sigmas", 3.0);
        require_positive(cfg.density.support_sigmas, "support_sigmas");
        break;
      }
    }
    density.finish();
    cfg.n_per_axis = particles.value<int>("n_per_axis");
    require_count(cfg.n_per_axis, "n_per_axis");
    particles.finish();
  }

  {
    Cursor time = root.child("time");
    cfg.dt = time.value<double>("dt");
    require_positive(cfg.dt, "dt");
    cfg.n_steps = time.value<int>("n_steps");
    if (cfg.n_steps < 0) throw ConfigError("key 'n_steps' must be >= 0");
    cfg.scheme = scheme_from_string(time.value<std::string>("scheme"));
    time.finish();
  }

  {
    Cursor solver = root.child("solver");
    cfg.surface.tol_mass = solver.value<double>("tol_mass");
    require_positive(cfg.surface.tol_mass, "tol_mass");
    cfg.surface.max_iter = solver.value<int>("max_iter");
    require_count(cfg.surface.max_iter, "max_iter");
    cfg.surface.eps_floor = solver.value<double>("eps_floor");
    require_positive(cfg.surface.eps_floor, "eps_floor");
    solver.finish();
  }

  {
    Cursor surface = root.child("surface");
    cfg.surface.tol_surface = surface.value<double>("tol_surface");
    require_positive(cfg.surface.tol_surface, "tol_surface");
    cfg.surface.max_outer = surface.value<int>("max_outer");
    require_count(cfg.surface.max_outer, "max_outer");
    cfg.surface.z_max_factor = surface.value_or<double>("z_max_factor", 10.0);
    require_positive(cfg.surface.z_max_factor, "z_max_factor");
    surface.finish();
  }

  {
    Cursor output = root.child("output");
    cfg.out_dir = output.value<std::string>("directory");
    cfg.checkpoint_every = output.value_or<int>("checkpoint_every", 10);
    require_count(cfg.checkpoint_every, "checkpoint_every");
    output.finish();
  }

  if (root.has("verify")) {
    Cursor verify = root.child("verify");
    cfg.probes = verify.value_or<std::vector<std::string>>("probes",
                                                           cfg.probes);
    cfg.n_pairs = verify.value_or<int>("n_pairs", 10000);
    if (cfg.n_pairs < 0) throw ConfigError("key 'n_pairs' must be >= 0");
    cfg.smoothing = verify.value_or<double>("smoothing", 0.0);
    if (cfg.smoothing < 0.0)
      throw ConfigError("key 'smoothing' must be >= 0");
    verify.finish();
  }

  root.finish();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["base"] = {{"lx", cfg.base.lx}, {"ly", cfg.base.ly}, {"nx", cfg.base.nx},
               {"ny", cfg.base.ny}, {"qx", cfg.base.qx}, {"qy", cfg.base.qy},
               {"ox", cfg.base.ox}, {"oy", cfg.base.oy}};
  nlohmann::ordered_json density;
  switch (cfg.density.kind) {
    case DensitySpec::Kind::uniform_box:
      density["kind"] = "uniform_box";
      density["lo"] = {cfg.density.box.lo.x, cfg.density.box.lo.y,
                       cfg.density.box.lo.z};
      density["hi"] = {cfg.density.box.hi.x, cfg.density.box.hi.y,
                       cfg.density.box.hi.z};
      break;
    case DensitySpec::Kind::gaussian_blob:
      density["kind"] = "gaussian_blob";
      density["center"] = {cfg.density.centers[0].x, cfg.density.centers[0].y,
                           cfg.density.centers[0].z};
      density["sigma"] = cfg.density.sigmas[0];
      density["support_sigmas"] = cfg.density.support_sigmas;
      break;
    case DensitySpec::Kind::two_blob:
      density["kind"] = "two_blob";
      density["centers"] = {{cfg.density.centers[0].x,
                             cfg.density.centers[0].y,
                             cfg.density.centers[0].z},
                            {cfg.density.centers[1].x,
                             cfg.density.centers[1].y,
                             cfg.density.centers[1].z}};
      density["sigmas"] = {cfg.density.sigmas[0], cfg.density.sigmas[1]};
      density["mix"] = {cfg.density.mix[0], cfg.density.mix[1]};
      density["support_sigmas"] = cfg.density.support_sigmas;
      break;
  }
  density["cell_average_m"] = cfg.density.cell_average_m;
  j["particles"] = {{"density", density}, {"n_per_axis", cfg.n_per_axis}};
  const char* scheme = cfg.scheme == TimeScheme::euler  ? "euler"
                       : cfg.scheme == TimeScheme::heun ? "heun"
                                                        : "rk4";
  j["time"] = {{"dt", cfg.dt}, {"n_steps", cfg.n_steps}, {"scheme", scheme}};
  j["solver"] = {{"tol_mass", cfg.surface.tol_mass},
                 {"max_iter", cfg.surface.max_iter},
                 {"eps_floor", cfg.surface.eps_floor}};
  j["surface"] = {{"tol_surface", cfg.surface.tol_surface},
                  {"max_outer", cfg.surface.max_outer},
                  {"z_max_factor", cfg.surface.z_max_factor}};
  j["output"] = {{"directory", cfg.out_dir},
                 {"checkpoint_every", cfg.checkpoint_every}};
  j["verify"] = {{"probes", cfg.probes},
                 {"n_pairs", cfg.n_pairs},
                 {"smoothing", cfg.smoothing}};
  return j;
}

}  // namespace sgfs
