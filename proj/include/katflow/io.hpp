#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "katflow/disks.hpp"
#include "katflow/solver.hpp"
#include "katflow/triangulation.hpp"

namespace katflow {

/// Malformed or inconsistent input document.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr const char* kPackingSchema = "katflow.packing/1";

struct PackingMeta {
    double contact_tol = 1e-6;
    double proj_tol = 1e-11;
    std::string graph_hash;
    int flip_count = 0;
};

struct PackingDocument {
    std::string schema_version = kPackingSchema;
    Packing packing;
    std::vector<Edge> contacts;
    PackingMeta meta;
};

/// {"n": int, "edges": [[i, j], ...]}
Graph parse_graph_json(const std::string& text);
std::string graph_to_json(const Graph& g);

std::string packing_to_json(const PackingDocument& doc);
PackingDocument parse_packing_json(const std::string& text);

std::string report_to_json(const SolveReport& report);

/// Stable 64-bit FNV-1a hash of the sorted edge list, as 16 hex digits.
std::string graph_hash(const Graph& g);

struct SvgOptions {
    std::optional<Graph> contacts;  // drawn as center-to-center segments
    bool incircle = false;          // incircle of the canonical tridisk
    std::vector<Edge> highlight;    // pairs drawn in a contrasting color
    bool labels = true;
};

/// SVG 1.1 document with one circle per disk.  The view box is the bounding
/// box of the canonical tridisk with a 5% margin, widened to the disks if
/// they do not fit.
std::string render_svg(const Packing& p, const SvgOptions& options = {});

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace katflow
