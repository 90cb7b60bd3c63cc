#pragma once

// Text formats for instances and their sidecars. Every record is keyed by
// lattice coordinates, and reals are written in shortest round-trip form so
// write -> read -> write reproduces the same bytes.

#include "lnls/ising.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace lnls {

struct InstanceHeader {
    std::string ensemble = "custom";
    std::uint64_t seed = 0;
};

struct Instance {
    InstanceHeader header;
    IsingModel model;
};

std::string format_real(double v);
double parse_real(std::string_view text);

void write_instance(std::ostream& out, const IsingModel& model, const InstanceHeader& header);
Instance read_instance(std::istream& in);

void save_instance(const std::filesystem::path& path, const IsingModel& model,
                   const InstanceHeader& header);
Instance load_instance(const std::filesystem::path& path);

/// Planted-solution sidecar: the planted state and its energy.
struct PlantedSolution {
    SpinState state;
    double ground_energy = 0.0;
};

void write_planted(std::ostream& out, const LatticeTopology& topo, const PlantedSolution& planted);
PlantedSolution read_planted(std::istream& in, const LatticeTopology& topo);

/// Ground-state estimate sidecar ("<instance>.e0").
struct E0Record {
    double e0 = 0.0;
    std::string provenance;
    std::string budget;
};

void write_e0(std::ostream& out, const E0Record& rec);
E0Record read_e0(std::istream& in);

/// Sidecar path convention: instance path with an extra extension.
std::filesystem::path sidecar_path(const std::filesystem::path& instance, std::string_view ext);

}  // namespace lnls
