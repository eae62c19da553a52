#include "statman/manifold_file.hpp"

#include <array>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "statman/errors.hpp"
#include "statman/models.hpp"

namespace statman {

namespace {

using nlohmann::json;

std::string triple_name(const std::array<int, 3>& t) {
    return "(" + std::to_string(t[0] + 1) + "," + std::to_string(t[1] + 1) + "," +
           std::to_string(t[2] + 1) + ")";
}

std::vector<std::array<double, 2>> parse_box(const json& j, int n) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw ParseError("'box' must be an array of " + std::to_string(n) + " [lo, hi] pairs");
    std::vector<std::array<double, 2>> box;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw ParseError("'box' entries must be [lo, hi] number pairs");
        double lo = e[0].get<double>(), hi = e[1].get<double>();
        if (!(lo < hi)) throw ParseError("'box' entry has lo >= hi");
        box.push_back({lo, hi});
    }
    return box;
}

/// 0-based sorted triple from a 1-based [i,j,k] array.
std::array<int, 3> parse_triple(const json& j, int n) {
    if (!j.is_array() || j.size() != 3)
        throw ParseError("cubic 'indices' must be a 3-element array");
    std::array<int, 3> t{};
    for (int s = 0; s < 3; ++s) {
        if (!j[s].is_number_integer()) throw ParseError("cubic indices must be integers");
        int v = j[s].get<int>();
        if (v < 1 || v > n)
            throw ParseError("cubic index " + std::to_string(v) + " out of range 1.." +
                             std::to_string(n));
        t[s] = v - 1;
    }
    std::sort(t.begin(), t.end());
    return t;
}

ManifoldFile from_builtin(const json& doc, const json& b, const std::string& name) {
    if (!b.is_object() || !b.contains("family") || !b["family"].is_string())
        throw ParseError("'builtin' needs a string 'family'");
    ModelSpec spec;
    spec.family = b["family"].get<std::string>();
    json params = b.value("params", json::object());
    if (!params.is_object()) throw ParseError("'builtin.params' must be an object");
    for (const auto& [key, val] : params.items()) {
        if (key == "n") {
            spec.n = val.get<int>();
        } else if (key == "r") {
            spec.r = val.get<double>();
        } else if (key == "chart") {
            spec.gamma_chart = val.get<std::string>();
        } else if (key == "entries") {
            spec.cubic_entries.clear();
            if (!val.is_array()) throw ParseError("'entries' must be an array");
            for (const auto& e : val) {
                if (!e.is_object() || !e.contains("indices") || !e.contains("value"))
                    throw ParseError("cubic entries need 'indices' and 'value'");
                auto t = parse_triple(e["indices"], spec.n);
                double v = e["value"].get<double>();
                auto [it, inserted] = spec.cubic_entries.emplace(t, v);
                if (!inserted && it->second != v)
                    throw ParseError("conflicting duplicate cubic entry " + triple_name(t));
            }
        } else {
            throw ParseError("unknown builtin parameter '" + key + "'");
        }
    }
    if (doc.contains("box")) {
        // Dimension is family-dependent; validate after construction.
        if (!doc["box"].is_array()) throw ParseError("'box' must be an array");
        std::vector<std::array<double, 2>> box;
        for (const auto& e : doc["box"]) {
            if (!e.is_array() || e.size() != 2) throw ParseError("'box' entries must be pairs");
            box.push_back({e[0].get<double>(), e[1].get<double>()});
        }
        spec.box = std::move(box);
    }
    ManifoldFile mf;
    try {
        mf.chart = builtin_chart(spec);
    } catch (const ParamError& e) {
        throw ParseError(std::string("invalid builtin: ") + e.what());
    }
    mf.name = name.empty() ? mf.chart.label : name;
    mf.chart.label = mf.name;
    return mf;
}

ManifoldFile from_custom(const json& doc, const json& c, const std::string& name) {
    if (!doc.contains("dim") || !doc["dim"].is_number_integer())
        throw ParseError("custom manifolds need an integer 'dim'");
    int n = doc["dim"].get<int>();
    if (n < 1 || n > 6) throw ParseError("'dim' must be in 1..6");
    std::vector<std::string> coords;
    if (doc.contains("coords")) {
        if (!doc["coords"].is_array() || static_cast<int>(doc["coords"].size()) != n)
            throw ParseError("'coords' must list exactly " + std::to_string(n) + " names");
        for (const auto& e : doc["coords"]) coords.push_back(e.get<std::string>());
    } else {
        for (int i = 0; i < n; ++i) coords.push_back("x" + std::to_string(i + 1));
    }
    if (!c.is_object() || !c.contains("metric"))
        throw ParseError("'custom' needs a 'metric' expression matrix");
    const json& m = c["metric"];
    if (!m.is_array() || static_cast<int>(m.size()) != n)
        throw ParseError("'metric' must be an " + std::to_string(n) + "x" +
                         std::to_string(n) + " matrix of expressions");
    std::vector<std::vector<std::string>> mtx(n);
    for (int i = 0; i < n; ++i) {
        if (!m[i].is_array() || static_cast<int>(m[i].size()) != n)
            throw ParseError("'metric' row " + std::to_string(i + 1) + " has wrong length");
        for (int j = 0; j < n; ++j) {
            if (!m[i][j].is_string()) throw ParseError("'metric' entries must be strings");
            mtx[i].push_back(m[i][j].get<std::string>());
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (mtx[i][j] != mtx[j][i])
                throw ParseError("metric entry (" + std::to_string(i + 1) + "," +
                                 std::to_string(j + 1) + ") differs from its transpose");
    std::map<std::pair<int, int>, std::string> metric_exprs;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) metric_exprs[{i, j}] = mtx[i][j];

    std::map<std::array<int, 3>, std::string> cubic_exprs;
    if (c.contains("cubic")) {
        if (!c["cubic"].is_array()) throw ParseError("'cubic' must be an array of entries");
        for (const auto& e : c["cubic"]) {
            if (!e.is_object() || !e.contains("indices") || !e.contains("expr") ||
                !e["expr"].is_string())
                throw ParseError("cubic entries need 'indices' and a string 'expr'");
            auto t = parse_triple(e["indices"], n);
            std::string expr = e["expr"].get<std::string>();
            auto [it, inserted] = cubic_exprs.emplace(t, expr);
            if (!inserted && it->second != expr)
                throw ParseError("conflicting duplicate cubic entry " + triple_name(t));
        }
    }

    JetStrategy strategy = JetStrategy::analytic;
    double fd_step = 1e-3;
    if (doc.contains("jets")) {
        const json& jj = doc["jets"];
        std::string mode = jj.value("mode", "analytic");
        if (mode == "fd")
            strategy = JetStrategy::finite_difference;
        else if (mode != "analytic")
            throw ParseError("'jets.mode' must be 'analytic' or 'fd'");
        fd_step = jj.value("fd_step", 1e-3);
        if (!(fd_step > 0)) throw ParseError("'jets.fd_step' must be positive");
    }
    if (!doc.contains("box")) throw ParseError("custom manifolds need a 'box'");
    auto box = parse_box(doc["box"], n);

    ManifoldFile mf;
    mf.name = name.empty() ? "custom" : name;
    mf.chart = custom_chart(n, coords, metric_exprs, cubic_exprs, strategy, fd_step, box);
    mf.chart.label = mf.name;
    return mf;
}

}  // namespace

ManifoldFile parse_manifold(const std::string& json_text) {
    json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) throw ParseError("manifold file is not valid JSON");
    if (!doc.is_object()) throw ParseError("manifold file must be a JSON object");
    if (doc.contains("schema") && doc["schema"] != "statman/1")
        throw ParseError("unsupported schema; expected \"statman/1\"");
    std::string name = doc.value("name", std::string{});
    bool has_builtin = doc.contains("builtin");
    bool has_custom = doc.contains("custom");
    if (has_builtin == has_custom)
        throw ParseError("exactly one of 'builtin' or 'custom' is required");

    ManifoldFile mf;
    try {
        mf = has_builtin ? from_builtin(doc, doc["builtin"], name)
                         : from_custom(doc, doc["custom"], name);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed manifold file: ") + e.what());
    }
    if (doc.contains("tolerances")) {
        const json& t = doc["tolerances"];
        if (!t.is_object()) throw ParseError("'tolerances' must be an object");
        mf.chart.tol = t.value("tol", mf.chart.tol);
        mf.chart.fd_tol = t.value("fd_tol", mf.chart.fd_tol);
        mf.chart.quad_tol = t.value("quad_tol", mf.chart.quad_tol);
        if (!(mf.chart.tol > 0) || !(mf.chart.fd_tol > 0) || !(mf.chart.quad_tol > 0))
            throw ParseError("tolerances must be positive");
    }
    return mf;
}

ManifoldFile load_manifold(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open manifold file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifold(buf.str());
}

}  // namespace statman
