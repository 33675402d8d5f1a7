#include "katflow/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace katflow {

using json = nlohmann::ordered_json;

namespace {

json edges_json(const std::vector<Edge>& edges) {
    json a = json::array();
    for (const Edge& e : edges) a.push_back({e.u, e.v});
    return a;
}

std::vector<Edge> parse_edges(const json& a, int n, const char* what) {
    if (!a.is_array()) throw InputError(std::string(what) + " must be an array");
    std::vector<Edge> out;
    for (const json& e : a) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
            throw InputError(std::string(what) + " entries must be [i, j] integer pairs");
        }
        const int i = e[0].get<int>();
        const int j = e[1].get<int>();
        if (i < 0 || j < 0 || i >= n || j >= n) {
            throw InputError(std::string(what) + ": vertex out of range in [" + std::to_string(i) + ", " +
                             std::to_string(j) + "]");
        }
        if (i == j) throw InputError(std::string(what) + ": self-loop at " + std::to_string(i));
        out.emplace_back(i, j);
    }
    return out;
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace

Graph parse_graph_json(const std::string& text) {
    const json doc = parse(text);
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("edges")) {
        throw InputError("graph JSON needs fields \"n\" and \"edges\"");
    }
    if (!doc["n"].is_number_integer() || doc["n"].get<long>() < 1) throw InputError("\"n\" must be a positive integer");
    const int n = doc["n"].get<int>();
    std::vector<Edge> edges = parse_edges(doc["edges"], n, "edges");
    std::vector<Edge> sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw InputError("edges: duplicate edge");
    return Graph::from_edges(n, std::move(edges));
}

std::string graph_to_json(const Graph& g) {
    return json{{"n", g.n}, {"edges", edges_json(g.edges)}}.dump() + "\n";
}

std::string packing_to_json(const PackingDocument& doc) {
    json disks = json::array();
    for (std::size_t i = 0; i < doc.packing.size(); ++i) {
        const Disk& d = doc.packing[i];
        disks.push_back({{"id", i}, {"x", d.center.real()}, {"y", d.center.imag()}, {"r", d.radius}});
    }
    const json out{{"schema_version", doc.schema_version},
                   {"disks", disks},
                   {"contacts", edges_json(doc.contacts)},
                   {"meta",
                    {{"contact_tol", doc.meta.contact_tol},
                     {"proj_tol", doc.meta.proj_tol},
                     {"graph_hash", doc.meta.graph_hash},
                     {"flip_count", doc.meta.flip_count}}}};
    return out.dump(2) + "\n";
}

PackingDocument parse_packing_json(const std::string& text) {
    const json doc = parse(text);
    if (!doc.is_object() || !doc.contains("disks")) throw InputError("packing JSON needs a \"disks\" array");
    PackingDocument out;
    out.schema_version = doc.value("schema_version", std::string(kPackingSchema));
    const json& disks = doc["disks"];
    if (!disks.is_array()) throw InputError("\"disks\" must be an array");
    const int n = static_cast<int>(disks.size());
    out.packing.disks.resize(disks.size());
    std::vector<char> seen(disks.size(), 0);
    for (const json& d : disks) {
        for (const char* key : {"id", "x", "y", "r"}) {
            if (!d.contains(key) || !d[key].is_number()) {
                throw InputError(std::string("disk entries need numeric \"") + key + "\"");
            }
        }
        if (!d["id"].is_number_integer()) throw InputError("disk ids must be integers");
        const int id = d["id"].get<int>();
        if (id < 0 || id >= n) throw InputError("disk ids must be dense and 0-based");
        if (seen[id]) throw InputError("duplicate disk id " + std::to_string(id));
        seen[id] = 1;
        const double r = d["r"].get<double>();
        if (!(r > 0.0)) throw InputError("disk " + std::to_string(id) + " has non-positive radius");
        out.packing.disks[id] = Disk{{d["x"].get<double>(), d["y"].get<double>()}, r};
    }
    if (doc.contains("contacts")) out.contacts = parse_edges(doc["contacts"], n, "contacts");
    if (doc.contains("meta") && doc["meta"].is_object()) {
        const json& m = doc["meta"];
        out.meta.contact_tol = m.value("contact_tol", out.meta.contact_tol);
        out.meta.proj_tol = m.value("proj_tol", out.meta.proj_tol);
        out.meta.graph_hash = m.value("graph_hash", std::string());
        out.meta.flip_count = m.value("flip_count", 0);
    }
    return out;
}

std::string report_to_json(const SolveReport& r) {
    json flips = json::array();
    for (const FlipSummary& f : r.flips) {
        flips.push_back({{"removed", {f.move.removed.u, f.move.removed.v}},
                         {"inserted", {f.move.inserted.u, f.move.inserted.v}},
                         {"marks", f.marks},
                         {"steps", f.steps},
                         {"rejected_steps", f.rejected_steps},
                         {"final_s", f.final_s},
                         {"event_error", f.event_error},
                         {"min_radius", f.min_radius},
                         {"min_sigma_ratio", f.min_sigma_ratio}});
    }
    json violations = json::array();
    for (const PairViolation& v : r.verification.violations) {
        violations.push_back({{"pair", {v.pair.u, v.pair.v}},
                              {"inversive_distance", v.inversive_distance},
                              {"should_touch", v.should_touch}});
    }
    const Verification& v = r.verification;
    const json out{{"input", {{"n", r.input.n}, {"edges", edges_json(r.input.edges)}}},
                   {"graph_hash", graph_hash(r.input)},
                   {"augmentation", edges_json(r.augmentation)},
                   {"dominant", r.dominant},
                   {"flip_count", r.flip_count},
                   {"flips", flips},
                   {"separation", {{"min_added", r.separation_min_added}, {"max_residual", r.separation_max_residual},
                                    {"min_radius", r.separation_min_radius}}},
                   {"verification",
                    {{"ok", v.ok()},
                     {"contact_exact", v.contact_exact},
                     {"max_contact_residual", v.max_contact_residual},
                     {"min_non_edge_distance", v.min_non_edge_distance},
                     {"min_radius", v.min_radius},
                     {"radius_floor", v.radius_floor},
                     {"min_sigma_ratio", v.min_sigma_ratio},
                     {"violations", violations}}},
                   {"failure", r.failure}};
    return out.dump(2) + "\n";
}

std::string graph_hash(const Graph& g) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t x) {
        for (int k = 0; k < 8; ++k) {
            h ^= (x >> (8 * k)) & 0xff;
            h *= 1099511628211ULL;
        }
    };
    mix(static_cast<std::uint64_t>(g.n));
    for (const Edge& e : g.edges) {
        mix(static_cast<std::uint64_t>(e.u));
        mix(static_cast<std::uint64_t>(e.v));
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

}  // namespace

std::string render_svg(const Packing& p, const SvgOptions& opt) {
    // Canonical tridisk: x in [-1, 3], y in [-1, 1 + sqrt 3].
    double x0 = -1.0;
    double x1 = 3.0;
    double y0 = -1.0;
    double y1 = 1.0 + std::sqrt(3.0);
    for (const Disk& d : p.disks) {
        x0 = std::min(x0, d.center.real() - d.radius);
        x1 = std::max(x1, d.center.real() + d.radius);
        y0 = std::min(y0, d.center.imag() - d.radius);
        y1 = std::max(y1, d.center.imag() + d.radius);
    }
    const double mx = 0.05 * (x1 - x0);
    const double my = 0.05 * (y1 - y0);
    x0 -= mx;
    x1 += mx;
    y0 -= my;
    y1 += my;
    const double stroke = 0.004 * std::max(x1 - x0, y1 - y0);

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\""
        << static_cast<int>(std::lround(800 * (y1 - y0) / (x1 - x0))) << "\" viewBox=\"" << num(x0) << ' '
        << num(-y1) << ' ' << num(x1 - x0) << ' ' << num(y1 - y0) << "\">\n"
        << "<rect x=\"" << num(x0) << "\" y=\"" << num(-y1) << "\" width=\"" << num(x1 - x0) << "\" height=\""
        << num(y1 - y0) << "\" fill=\"white\"/>\n";
    // y is flipped so the picture has the usual orientation.
    if (opt.incircle) {
        const Disk inc = tridisk_incircle(canonical_tridisk());
        out << "<circle cx=\"" << num(inc.center.real()) << "\" cy=\"" << num(-inc.center.imag()) << "\" r=\""
            << num(inc.radius) << "\" fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"" << num(3 * stroke)
            << "\" stroke-width=\"" << num(stroke) << "\"/>\n";
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Disk& d = p[i];
        out << "<circle id=\"d" << i << "\" cx=\"" << num(d.center.real()) << "\" cy=\"" << num(-d.center.imag())
            << "\" r=\"" << num(d.radius) << "\" fill=\"#cfe3f7\" stroke=\"#1f4e79\" stroke-width=\""
            << num(stroke) << "\"/>\n";
    }
    auto segment = [&](Edge e, const char* color) {
        out << "<line x1=\"" << num(p[e.u].center.real()) << "\" y1=\"" << num(-p[e.u].center.imag())
            << "\" x2=\"" << num(p[e.v].center.real()) << "\" y2=\"" << num(-p[e.v].center.imag())
            << "\" stroke=\"" << color << "\" stroke-width=\"" << num(stroke) << "\"/>\n";
    };
    if (opt.contacts) {
        for (const Edge& e : opt.contacts->edges) segment(e, "#444444");
    }
    for (const Edge& e : opt.highlight) segment(e, "#c00000");
    if (opt.labels) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            const Disk& d = p[i];
            out << "<text x=\"" << num(d.center.real()) << "\" y=\"" << num(-d.center.imag())
                << "\" font-size=\"" << num(0.8 * d.radius) << "\" text-anchor=\"middle\" dominant-baseline=\"central\">"
                << i << "</text>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("error writing " + path);
}

}  // namespace katflow
