// presets.hpp
// Built-in experiment configurations, one per shipped scenario. The files
// under presets/ mirror these strings; a unit test keeps them in sync.
#pragma once

#include <map>
#include <string>

namespace difflab {

inline const std::map<std::string, std::string>& preset_configs() {
    static const std::map<std::string, std::string> presets = {
        {"c01_recovery", R"JSON({
  "generator": {"kind": "lattice", "dim": 2},
  "model": {"variant": "iid", "dist": {"kind": "gaussian_iso", "sigma": 0.1}, "seed": 1},
  "frequencies": {"kind": "explicit", "values": [[1.0, 0.0]]},
  "r_schedule": [50, 100, 150],
  "seeds": [1],
  "analyses": ["spectrum", "recover"],
  "recover_abs_tol": 0.03,
  "output_dir": "out/c01"
})JSON"},
        {"c02_sigma_invariance", R"JSON({
  "generator": {"kind": "lattice", "dim": 2},
  "model": {"variant": "iid", "dist": {"kind": "gaussian_iso", "sigma": 0.2}, "seed": 1},
  "frequencies": {"kind": "explicit", "values": [[1.0, 0.0]]},
  "r_schedule": [50, 100, 150],
  "seeds": [1],
  "analyses": ["recover"],
  "recover_abs_tol": 0.05,
  "output_dir": "out/c02"
})JSON"},
        {"c03_visible_density", R"JSON({
  "generator": {"kind": "visible_points", "dim": 2},
  "frequencies": {"kind": "explicit", "values": [[1.0, 0.0]]},
  "r_schedule": [200, 400, 600],
  "analyses": ["spectrum"],
  "output_dir": "out/c03"
})JSON"},
        {"c04_fibonacci_recovery", R"JSON({
  "generator": {"kind": "cut_and_project", "preset": "fibonacci"},
  "model": {"variant": "iid", "dist": {"kind": "gaussian_iso", "sigma": 0.05}, "seed": 26},
  "frequencies": {"kind": "dual_module", "intensity_floor": 0.25, "max_norm": 6.0, "count": 5, "positive_only": true},
  "r_schedule": [2500, 5000, 10000],
  "seeds": [26],
  "analyses": ["recover"],
  "recover_rel_tol": 0.02,
  "output_dir": "out/c04"
})JSON"},
        {"c05_escape", R"JSON({
  "generator": {"kind": "lattice", "dim": 2},
  "model": {"variant": "iid", "dist": {"kind": "gaussian_iso", "sigma": 0.1}, "seed": 2},
  "frequencies": {"kind": "explicit", "values": [[1.0, 0.0]]},
  "r_schedule": [50, 100, 200],
  "seeds": [2],
  "analyses": ["escape"],
  "escape_max": 0.01,
  "output_dir": "out/c05"
})JSON"},
        {"c06_gamma", R"JSON({
  "generator": {"kind": "lattice", "dim": 2},
  "model": {"variant": "iid", "dist": {"kind": "gaussian_iso", "sigma": 0.1}, "seed": 3},
  "frequencies": {"kind": "explicit", "values": [[1.0, 0.0]]},
  "r_schedule": [150],
  "seeds": [3],
  "analyses": ["gamma"],
  "lag_radius": 10,
  "gamma_rel_tol": 0.05,
  "output_dir": "out/c06"
})JSON"},
        {"c07_strungaru", R"JSON({
  "generator": {"kind": "lattice", "dim": 2},
  "model": {"variant": "iid", "dist": {"kind": "gaussian_iso", "sigma": 0.1}, "seed": 4},
  "frequencies": {"kind": "explicit", "values": [[1.0, 0.0]]},
  "r_schedule": [150],
  "seeds": [4],
  "analyses": ["strungaru"],
  "lag_radius": 10,
  "output_dir": "out/c07"
})JSON"},
        {"c08_structure", R"JSON({
  "generator": {"kind": "lattice", "dim": 2},
  "model": {"variant": "iid", "dist": {"kind": "gaussian_iso", "sigma": 0.1}, "seed": 5},
  "frequencies": {"kind": "grid", "extent": 0.75, "step": 0.25},
  "r_schedule": [60],
  "seeds": [5],
  "analyses": ["structure"],
  "n_realizations": 50,
  "output_dir": "out/c08"
})JSON"},
        {"c09_shell_mixing", R"JSON({
  "generator": {"kind": "lattice", "dim": 2},
  "model": {"variant": "shell_mixing", "dist": {"kind": "gaussian_iso", "sigma": 0.1},
            "shells": [2, 10, 60, 420], "coupling": 0.5, "seed": 6},
  "frequencies": {"kind": "explicit", "values": [[1.0, 0.0]]},
  "r_schedule": [50, 100, 150],
  "seeds": [6],
  "analyses": ["recover", "gamma"],
  "lag_radius": 10,
  "recover_abs_tol": 0.03,
  "gamma_rel_tol": 0.05,
  "output_dir": "out/c09"
})JSON"},
        {"c10_deformed_lattice", R"JSON({
  "generator": {"kind": "deformed_lattice", "dim": 2, "amplitude": 0.3, "exponent": 1.0, "direction_seed": 9},
  "model": {"variant": "lattice_ar", "dist": {"kind": "gaussian_iso", "sigma": 0.1}, "rho": 0.5, "seed": 7},
  "frequencies": {"kind": "explicit", "values": [[1.0, 0.0]]},
  "r_schedule": [50, 100, 150],
  "seeds": [7],
  "analyses": ["recover"],
  "recover_abs_tol": 0.03,
  "output_dir": "out/c10"
})JSON"},
        {"c11_slln", R"JSON({
  "generator": {"kind": "lattice", "dim": 1},
  "frequencies": {"kind": "explicit", "values": [[1.0]]},
  "r_schedule": [10],
  "seeds": [8],
  "analyses": ["slln"],
  "slln_n": 1000000,
  "ar_beta": 0.5,
  "output_dir": "out/c11"
})JSON"},
        {"c12_hellinger", R"JSON({
  "generator": {"kind": "lattice", "dim": 2},
  "model": {"variant": "iid", "dist": {"kind": "gaussian_iso", "sigma": 0.1}, "seed": 1},
  "frequencies": {"kind": "explicit", "values": [[1.0, 0.0]]},
  "r_schedule": [50, 100, 150],
  "seeds": [1, 2, 3, 4, 5, 6, 7, 8],
  "analyses": ["hellinger"],
  "bump_width": 0.15,
  "grid_extent": 0.6,
  "grid_step": 0.025,
  "output_dir": "out/c12"
})JSON"},
        {"c13_determinism", R"JSON({
  "generator": {"kind": "lattice", "dim": 2},
  "model": {"variant": "iid", "dist": {"kind": "gaussian_iso", "sigma": 0.1}, "seed": 1},
  "frequencies": {"kind": "explicit", "values": [[1.0, 0.0]]},
  "r_schedule": [50, 100, 150],
  "seeds": [1],
  "analyses": ["spectrum", "recover"],
  "recover_abs_tol": 0.03,
  "output_dir": "out/c13"
})JSON"},
    };
    return presets;
}

}  // namespace difflab
