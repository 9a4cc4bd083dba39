// config.hpp — Run configuration: a small TOML-style key tree (sections,
// dotted keys, scalars and numeric arrays), schema validation into typed run
// settings, dot-path overrides, and a stable content hash for manifests.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qkh/bath.hpp"
#include "qkh/drive.hpp"
#include "qkh/errors.hpp"
#include "qkh/gauge.hpp"
#include "qkh/optomech.hpp"
#include "qkh/potential.hpp"
#include "qkh/propagate.hpp"

namespace qkh {

struct ConfigValue {
    enum class Kind { string, number, boolean, number_array } kind = Kind::string;
    std::string str;
    double num = 0.0;
    bool flag = false;
    std::vector<double> array;
};

// Flat map of dotted paths to values; deterministic iteration order.
class ConfigTree {
public:
    static ConfigTree parse(const std::string& text);
    static ConfigTree parse_file(const std::string& path);

    bool has(const std::string& path) const { return values_.count(path) > 0; }

    std::string get_string(const std::string& path) const;
    std::string get_string_or(const std::string& path, const std::string& fallback) const;
    double get_number(const std::string& path) const;
    double get_number_or(const std::string& path, double fallback) const;
    int get_int_or(const std::string& path, int fallback) const;
    bool get_bool_or(const std::string& path, bool fallback) const;
    std::vector<double> get_array(const std::string& path) const;

    // key=value with the value parsed like a config scalar.
    void override_path(const std::string& assignment);

    // Canonical text dump (sorted paths) and its FNV-1a hash.
    std::string canonical_text() const;
    std::string content_hash() const;

    const std::map<std::string, ConfigValue>& values() const { return values_; }

private:
    std::map<std::string, ConfigValue> values_;
};

// --------------------------------------------------------------------------
// Typed run settings assembled from the tree.

enum class FrameKind { lab, final_frame, continuum };

struct RunSettings {
    FrameKind frame = FrameKind::lab;
    SpatialGrid grid{256, -10.0, 10.0};
    int n_cut = 16;
    PotentialSpec potential;
    DriveSpec drive;
    bool has_drive = false;
    std::optional<BathSpec> bath;
    PropagatorConfig prop;
    StageConfig stage;
    int order = 1;
    double t0 = 0.0;
    double t1 = 1.0;
    std::optional<TrapRegion> region;
    ParticleInit particle;
    OscillatorInit oscillator;
    std::optional<OptomechParams> optomech;
    bool write_snapshots = false;
    double mass = 1.0;
};

RunSettings build_settings(const ConfigTree& tree);

// Optomech SI block only (for the mapping subcommand).
OptomechParams build_optomech(const ConfigTree& tree);

}  // namespace qkh
