#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "mofkit/lipschitz.hpp"

namespace mofkit {

// Ball cover request, resolved against D^norm at run time.
struct CoverSpec {
    std::vector<int> centers;
    double radius = 0.0;
};

struct Scenario {
    MofPtr mof;
    std::vector<std::pair<std::string, OperatorField>> fields;
    std::vector<CoverSpec> covers;
    std::optional<std::uint64_t> seed;
};

// Whole file as bytes. Throws ParseError when the file cannot be read.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

// Self-contained JSON document; doubles round-trip bit for bit.
std::string scenario_to_text(
    const MofSpace& m,
    const std::vector<std::pair<std::string, OperatorField>>& fields = {},
    const std::vector<CoverSpec>& covers = {}, std::optional<std::uint64_t> seed = {});

// FNV-1a over the raw bytes, hex encoded.
std::string input_digest(const std::string& bytes);

} // namespace mofkit
