// config.hpp: JSON run configuration, validated into a canonical form that builds models

#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "purestat/bifurcation.hpp"
#include "purestat/evolve.hpp"
#include "purestat/models.hpp"
#include "purestat/types.hpp"

namespace purestat::config {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

[[noreturn]] inline void fail(const std::string& where, const std::string& msg) {
    throw Error(ErrorKind::InvalidConfig, where + ": " + msg);
}

namespace detail {

inline void check_object(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(where, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) fail(where, "unknown key '" + it.key() + "'");
    }
}

inline const json* find(const json& j, const char* key) {
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

inline double real_value(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(where, "must be finite");
    return x;
}

inline double real(const json& j, const char* key, const std::string& where, std::optional<double> def = {}) {
    const json* v = find(j, key);
    if (v == nullptr) {
        if (!def) fail(where, std::string("missing required key '") + key + "'");
        return *def;
    }
    return real_value(*v, where + "." + key);
}

inline double positive(const json& j, const char* key, const std::string& where, std::optional<double> def = {}) {
    const double x = real(j, key, where, def);
    if (!(x > 0.0)) fail(where + "." + key, "must be positive");
    return x;
}

inline std::int64_t integer(const json& j, const char* key, const std::string& where, std::optional<std::int64_t> def = {}) {
    const json* v = find(j, key);
    if (v == nullptr) {
        if (!def) fail(where, std::string("missing required key '") + key + "'");
        return *def;
    }
    if (!v->is_number_integer()) fail(where + "." + key, "expected an integer");
    return v->get<std::int64_t>();
}

inline bool boolean(const json& j, const char* key, const std::string& where, bool def) {
    const json* v = find(j, key);
    if (v == nullptr) return def;
    if (!v->is_boolean()) fail(where + "." + key, "expected true or false");
    return v->get<bool>();
}

inline std::string string(const json& j, const char* key, const std::string& where, std::optional<std::string> def = {}) {
    const json* v = find(j, key);
    if (v == nullptr) {
        if (!def) fail(where, std::string("missing required key '") + key + "'");
        return *def;
    }
    if (!v->is_string()) fail(where + "." + key, "expected a string");
    return v->get<std::string>();
}

/// A complex number is written as a real number or as [re, im].
inline cplx complex_value(const json& v, const std::string& where) {
    if (v.is_number()) return {real_value(v, where), 0.0};
    if (v.is_array() && v.size() == 2) return {real_value(v[0], where + "[0]"), real_value(v[1], where + "[1]")};
    fail(where, "expected a number or [re, im]");
}

inline json complex_json(cplx z) {
    if (z.imag() == 0.0) return z.real();
    return json::array({z.real(), z.imag()});
}

inline const json& array(const json& j, const char* key, const std::string& where) {
    const json* v = find(j, key);
    if (v == nullptr) fail(where, std::string("missing required key '") + key + "'");
    if (!v->is_array()) fail(where + "." + key, "expected an array");
    return *v;
}

inline json real_list(const json& arr, const std::string& where) {
    json out = json::array();
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(real_value(arr[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline json complex_list(const json& arr, const std::string& where) {
    json out = json::array();
    for (std::size_t i = 0; i < arr.size(); ++i)
        out.push_back(complex_json(complex_value(arr[i], where + "[" + std::to_string(i) + "]")));
    return out;
}

// ---------------------------------------------------------------------------
// Canonicalization: validate, fill defaults, normalize number types.

inline json canon_hilbert(const json& j) {
    const std::string w = "hilbert";
    check_object(j, w, {"dim", "hbar", "mass", "omega"});
    json out;
    const auto dim = integer(j, "dim", w, 32);
    if (dim < 2 || dim > 4096) fail(w + ".dim", "must be in [2, 4096]");
    out["dim"] = dim;
    out["hbar"] = positive(j, "hbar", w, 1.0);
    out["mass"] = positive(j, "mass", w, 1.0);
    out["omega"] = positive(j, "omega", w, 1.0);
    return out;
}

inline json canon_hamiltonian(const json& j, std::int64_t dim, const std::string& w) {
    check_object(j, w, {"kind", "lambda", "values", "re", "im"});
    json out;
    const std::string kind = string(j, "kind", w, "oscillator");
    out["kind"] = kind;
    if (kind == "oscillator" || kind == "oscillator_qp") {
        check_object(j, w, {"kind"});
    } else if (kind == "squeezed") {
        check_object(j, w, {"kind", "lambda"});
        out["lambda"] = real(j, "lambda", w);
    } else if (kind == "diagonal") {
        check_object(j, w, {"kind", "values"});
        out["values"] = real_list(array(j, "values", w), w + ".values");
        if (static_cast<std::int64_t>(out["values"].size()) != dim) fail(w + ".values", "length must equal hilbert.dim");
    } else if (kind == "matrix") {
        check_object(j, w, {"kind", "re", "im"});
        for (const char* part : {"re", "im"}) {
            if (find(j, part) == nullptr) {
                if (std::string(part) == "re") fail(w, "missing required key 're'");
                continue;
            }
            const json& rows = array(j, part, w);
            if (static_cast<std::int64_t>(rows.size()) != dim) fail(w + "." + part, "must have hilbert.dim rows");
            json m = json::array();
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const std::string wr = w + "." + part + "[" + std::to_string(r) + "]";
                if (!rows[r].is_array() || static_cast<std::int64_t>(rows[r].size()) != dim)
                    fail(wr, "must have hilbert.dim entries");
                m.push_back(real_list(rows[r], wr));
            }
            out[part] = m;
        }
    } else {
        fail(w + ".kind", "unknown Hamiltonian kind '" + kind + "'");
    }
    return out;
}

inline json canon_operator_name(const json& j, const char* key, const std::string& w) {
    const std::string name = string(j, key, w);
    if (name != "q" && name != "p" && name != "H" && name != "I") fail(w + "." + key, "operator must be one of q, p, H, I");
    return name;
}

inline json canon_bifunction(const json& j, const std::string& w) {
    if (!j.is_object()) fail(w, "expected an object");
    const std::string kind = string(j, "kind", w);
    json out;
    out["kind"] = kind;
    if (kind == "polynomial") {
        check_object(j, w, {"kind", "a"});
        const json& rows = array(j, "a", w);
        json a = json::array();
        for (std::size_t n = 0; n < rows.size(); ++n) {
            const std::string wr = w + ".a[" + std::to_string(n) + "]";
            if (!rows[n].is_array() || rows[n].size() != n + 1) fail(wr, "row n must hold n+1 coefficients");
            a.push_back(complex_list(rows[n], wr));
        }
        if (a.empty()) fail(w + ".a", "must not be empty");
        out["a"] = a;
    } else if (kind == "jordan_powers") {
        check_object(j, w, {"kind", "c"});
        out["c"] = real_list(array(j, "c", w), w + ".c");
        if (out["c"].empty()) fail(w + ".c", "must not be empty");
    } else if (kind == "cosine") {
        check_object(j, w, {"kind", "eps0"});
        out["eps0"] = positive(j, "eps0", w);
    } else if (kind == "affine") {
        check_object(j, w, {"kind", "c0", "c_left", "c_right"});
        out["c0"] = real(j, "c0", w, 0.0);
        out["c_left"] = real(j, "c_left", w, 0.0);
        out["c_right"] = real(j, "c_right", w, 0.0);
    } else {
        fail(w + ".kind", "unknown function kind '" + kind + "'");
    }
    return out;
}

inline json canon_recipe(const json& j, const std::string& w) {
    if (!j.is_object()) fail(w, "expected an object");
    const std::string kind = string(j, "kind", w);
    json out;
    out["kind"] = kind;
    if (kind == "lie") {
        check_object(j, w, {"kind", "x"});
        out["x"] = canon_operator_name(j, "x", w);
    } else if (kind == "lie_jordan") {
        check_object(j, w, {"kind", "x", "y"});
        out["x"] = canon_operator_name(j, "x", w);
        out["y"] = canon_operator_name(j, "y", w);
    } else if (kind == "identity") {
        check_object(j, w, {"kind"});
    } else {
        fail(w + ".kind", "unknown superoperator recipe '" + kind + "'");
    }
    return out;
}

inline json canon_model(const json& j, std::int64_t dim) {
    const std::string w = "model";
    if (!j.is_object()) fail(w, "expected an object");
    const std::string name = string(j, "name", w);
    json out;
    out["name"] = name;
    auto hamiltonian = [&] {
        const json* h = find(j, "hamiltonian");
        out["hamiltonian"] = canon_hamiltonian(h ? *h : json::object(), dim, w + ".hamiltonian");
    };
    if (name == "closed") {
        check_object(j, w, {"name", "hamiltonian"});
        hamiltonian();
    } else if (name == "general_open") {
        check_object(j, w, {"name", "hamiltonian", "terms"});
        hamiltonian();
        json terms = json::array();
        const json* t = find(j, "terms");
        if (t != nullptr) {
            if (!t->is_array()) fail(w + ".terms", "expected an array");
            for (std::size_t k = 0; k < t->size(); ++k) {
                const std::string wt = w + ".terms[" + std::to_string(k) + "]";
                check_object((*t)[k], wt, {"f", "n"});
                if (find((*t)[k], "f") == nullptr || find((*t)[k], "n") == nullptr) fail(wt, "needs keys 'f' and 'n'");
                terms.push_back({{"f", canon_recipe((*t)[k]["f"], wt + ".f")}, {"n", canon_bifunction((*t)[k]["n"], wt + ".n")}});
            }
        }
        out["terms"] = terms;
    } else if (name == "friction") {
        check_object(j, w, {"name", "Delta", "gamma", "beta", "form"});
        out["Delta"] = real(j, "Delta", w);
        out["gamma"] = real(j, "gamma", w);
        out["beta"] = real(j, "beta", w);
        const std::string form = string(j, "form", w, "commutator");
        if (form != "commutator" && form != "superop") fail(w + ".form", "must be 'commutator' or 'superop'");
        out["form"] = form;
    } else if (name == "cosine") {
        check_object(j, w, {"name", "eps0"});
        out["eps0"] = positive(j, "eps0", w);
    } else if (name == "lindblad_poly") {
        check_object(j, w, {"name", "hamiltonian", "v"});
        hamiltonian();
        const json& rows = array(j, "v", w);
        if (rows.empty()) fail(w + ".v", "needs at least one row");
        json v = json::array();
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const std::string wr = w + ".v[" + std::to_string(k) + "]";
            if (!rows[k].is_array() || rows[k].empty()) fail(wr, "expected a non-empty array");
            v.push_back(complex_list(rows[k], wr));
        }
        out["v"] = v;
    } else if (name == "brownian") {
        check_object(j, w, {"name", "lambda", "a", "alpha", "beta"});
        out["lambda"] = real(j, "lambda", w, 0.0);
        out["a"] = complex_list(array(j, "a", w), w + ".a");
        out["alpha"] = real(j, "alpha", w, 0.0);
        out["beta"] = real(j, "beta", w, 0.0);
    } else if (name == "fold") {
        check_object(j, w, {"name", "alpha0", "alpha1", "alpha2"});
        out["alpha0"] = real(j, "alpha0", w);
        out["alpha1"] = real(j, "alpha1", w);
        out["alpha2"] = real(j, "alpha2", w);
        if (out["alpha2"].get<double>() == 0.0) fail(w + ".alpha2", "must be nonzero");
    } else {
        fail(w + ".name", "unknown model '" + name + "'");
    }
    return out;
}

inline json canon_steady(const json& j) {
    check_object(j, "steady", {"tol"});
    return {{"tol", positive(j, "tol", "steady", 1e-9)}};
}

inline json canon_evolve(const json& j) {
    const std::string w = "evolve";
    check_object(j, w, {"t_max", "grid_points", "method", "dt", "initial_state"});
    json out;
    out["t_max"] = positive(j, "t_max", w, 10.0);
    const auto pts = integer(j, "grid_points", w, 101);
    if (pts < 2) fail(w + ".grid_points", "must be >= 2");
    out["grid_points"] = pts;
    const std::string method = string(j, "method", w, "expm");
    if (method != "expm" && method != "rk4") fail(w + ".method", "must be 'expm' or 'rk4'");
    out["method"] = method;
    const double dt = real(j, "dt", w, 0.0);
    if (dt < 0.0) fail(w + ".dt", "must be >= 0 (0 selects the default step)");
    out["dt"] = dt;

    const json* init = find(j, "initial_state");
    const json in = init ? *init : json{{"fock_level", 0}};
    const std::string wi = w + ".initial_state";
    check_object(in, wi, {"fock_level", "mixture", "coherence"});
    if (in.size() != 1) fail(wi, "exactly one of fock_level, mixture, coherence");
    if (find(in, "fock_level") != nullptr) {
        const auto n = integer(in, "fock_level", wi);
        if (n < 0) fail(wi + ".fock_level", "must be >= 0");
        out["initial_state"] = {{"fock_level", n}};
    } else if (find(in, "mixture") != nullptr) {
        const json w8 = real_list(array(in, "mixture", wi), wi + ".mixture");
        double sum = 0.0;
        for (const auto& x : w8) {
            if (x.get<double>() < 0.0) fail(wi + ".mixture", "weights must be non-negative");
            sum += x.get<double>();
        }
        if (!(sum > 0.0)) fail(wi + ".mixture", "weights must not all vanish");
        out["initial_state"] = {{"mixture", w8}};
    } else {
        const json& c = array(in, "coherence", wi);
        if (c.size() != 2 || !c[0].is_number_integer() || !c[1].is_number_integer() || c[0].get<std::int64_t>() < 0 ||
            c[1].get<std::int64_t>() < 0 || c[0] == c[1])
            fail(wi + ".coherence", "expected two distinct non-negative levels [n, m]");
        out["initial_state"] = {{"coherence", c}};
    }
    return out;
}

inline json canon_algebra(const json& j) {
    const std::string w = "algebra";
    check_object(j, w, {"dim", "trials", "seed"});
    json out;
    const auto dim = integer(j, "dim", w, 5);
    if (dim < 2 || dim > 32) fail(w + ".dim", "must be in [2, 32]");
    const auto trials = integer(j, "trials", w, 100);
    if (trials < 1) fail(w + ".trials", "must be >= 1");
    const json* s = find(j, "seed");
    if (s != nullptr && !(s->is_number_unsigned() || (s->is_number_integer() && s->get<std::int64_t>() >= 0)))
        fail(w + ".seed", "expected a non-negative integer");
    out["dim"] = dim;
    out["trials"] = trials;
    out["seed"] = s ? s->get<std::uint64_t>() : std::uint64_t{7};
    return out;
}

inline CatastropheFamily family_from_string(const std::string& s, const std::string& w) {
    if (s == "A+") return CatastropheFamily::A_plus;
    if (s == "A-") return CatastropheFamily::A_minus;
    if (s == "D+") return CatastropheFamily::D_plus;
    if (s == "D-") return CatastropheFamily::D_minus;
    if (s == "E6+") return CatastropheFamily::E6_plus;
    if (s == "E6-") return CatastropheFamily::E6_minus;
    if (s == "E7") return CatastropheFamily::E7;
    if (s == "E8") return CatastropheFamily::E8;
    fail(w, "unknown family '" + s + "' (A+, A-, D+, D-, E6+, E6-, E7, E8)");
}

inline json canon_catastrophe(const json& j) {
    const std::string w = "catastrophe";
    check_object(j, w, {"family", "n", "a", "variables", "quadratic_signs"});
    json out;
    const std::string fam = string(j, "family", w);
    const CatastropheFamily f = family_from_string(fam, w + ".family");
    const bool a_type = f == CatastropheFamily::A_plus || f == CatastropheFamily::A_minus;
    const bool d_type = f == CatastropheFamily::D_plus || f == CatastropheFamily::D_minus;
    out["family"] = fam;
    out["n"] = (a_type || d_type) ? integer(j, "n", w) : integer(j, "n", w, 0);
    out["a"] = real_list(array(j, "a", w), w + ".a");
    out["variables"] = integer(j, "variables", w, a_type ? 1 : 2);
    json signs = json::array();
    if (const json* qs = find(j, "quadratic_signs")) {
        if (!qs->is_array()) fail(w + ".quadratic_signs", "expected an array");
        for (const auto& s : *qs) {
            if (!s.is_number_integer() || (s.get<int>() != 1 && s.get<int>() != -1))
                fail(w + ".quadratic_signs", "entries must be +1 or -1");
            signs.push_back(s.get<int>());
        }
    }
    out["quadratic_signs"] = signs;
    return out;
}

inline std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::stringstream ss(path);
    std::string item;
    while (std::getline(ss, item, '.')) parts.push_back(item);
    return parts;
}

inline json* resolve(json& root, const std::string& path) {
    json* cur = &root;
    for (const auto& part : split_path(path)) {
        if (part.empty()) return nullptr;
        if (cur->is_object()) {
            auto it = cur->find(part);
            if (it == cur->end()) return nullptr;
            cur = &*it;
        } else if (cur->is_array()) {
            if (part.find_first_not_of("0123456789") != std::string::npos) return nullptr;
            const std::size_t idx = std::stoul(part);
            if (idx >= cur->size()) return nullptr;
            cur = &(*cur)[idx];
        } else {
            return nullptr;
        }
    }
    return cur;
}

inline json canon_sweep(const json& j, json& whole) {
    const std::string w = "sweep";
    check_object(j, w, {"parameter", "from", "to", "points", "build_generators", "probe_levels", "tol_match", "domain"});
    json out;
    const std::string path = string(j, "parameter", w);
    const std::string head = path.substr(0, path.find('.'));
    if (head != "model" && head != "hilbert") fail(w + ".parameter", "path must start with 'model.' or 'hilbert.'");
    json* target = resolve(whole, path);
    if (target == nullptr) fail(w + ".parameter", "path '" + path + "' does not address a field");
    if (!target->is_number_float()) fail(w + ".parameter", "path '" + path + "' does not address a real-valued field");
    out["parameter"] = path;
    out["from"] = real(j, "from", w);
    out["to"] = real(j, "to", w);
    const auto pts = integer(j, "points", w);
    if (pts < 1 || pts > 100000) fail(w + ".points", "must be in [1, 100000]");
    out["points"] = pts;
    out["build_generators"] = boolean(j, "build_generators", w, false);
    json probes = json::array();
    if (const json* pl = find(j, "probe_levels")) {
        if (!pl->is_array()) fail(w + ".probe_levels", "expected an array");
        for (const auto& n : *pl) {
            if (!n.is_number_integer() || n.get<std::int64_t>() < 0) fail(w + ".probe_levels", "entries must be non-negative integers");
            probes.push_back(n.get<std::int64_t>());
        }
    }
    out["probe_levels"] = probes;
    out["tol_match"] = positive(j, "tol_match", w, 1e-6);
    if (const json* dom = find(j, "domain")) {
        if (!dom->is_array() || dom->size() != 2) fail(w + ".domain", "expected [lo, hi]");
        const double lo = real_value((*dom)[0], w + ".domain[0]"), hi = real_value((*dom)[1], w + ".domain[1]");
        if (!(lo < hi)) fail(w + ".domain", "needs lo < hi");
        out["domain"] = json::array({lo, hi});
    }
    return out;
}

} // namespace detail

/// Validated configuration in canonical form: every block that applies is
/// present with defaults filled, real-valued fields are stored as floats and
/// complex values as a number or [re, im].
struct RunConfig {
    json canonical;

    bool has(const char* block) const { return canonical.contains(block); }
    const json& block(const char* name) const {
        if (!has(name)) fail(name, "block is required for this command");
        return canonical.at(name);
    }
};

inline RunConfig parse_config(const json& raw) {
    detail::check_object(raw, "config", {"model", "hilbert", "steady", "evolve", "sweep", "algebra", "catastrophe"});
    json c;
    const json* h = detail::find(raw, "hilbert");
    c["hilbert"] = detail::canon_hilbert(h ? *h : json::object());
    const std::int64_t dim = c["hilbert"]["dim"].get<std::int64_t>();
    if (const json* m = detail::find(raw, "model")) c["model"] = detail::canon_model(*m, dim);
    const json* s = detail::find(raw, "steady");
    c["steady"] = detail::canon_steady(s ? *s : json::object());
    const json* e = detail::find(raw, "evolve");
    c["evolve"] = detail::canon_evolve(e ? *e : json::object());
    const json* a = detail::find(raw, "algebra");
    c["algebra"] = detail::canon_algebra(a ? *a : json::object());
    if (const json* k = detail::find(raw, "catastrophe")) c["catastrophe"] = detail::canon_catastrophe(*k);
    if (const json* sw = detail::find(raw, "sweep")) c["sweep"] = detail::canon_sweep(*sw, c);
    return RunConfig{std::move(c)};
}

inline RunConfig parse_config_text(const std::string& text) {
    json raw;
    try {
        raw = json::parse(text);
    } catch (const json::parse_error& e) {
        fail("config", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(raw);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("config", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// Pretty canonical text; parse_config(canonical_text(c)) reproduces c.
inline std::string canonical_text(const RunConfig& c) { return c.canonical.dump(2) + "\n"; }

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string config_hash(const RunConfig& c) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(c.canonical.dump())));
    return buf;
}

struct Overrides {
    std::optional<std::int64_t> dim;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
};

/// Command-line flags overriding config fields. --dim sets hilbert.dim, and
/// algebra.dim for verify-algebra; --tol sets steady.tol; --seed sets algebra.seed.
inline RunConfig apply_overrides(const RunConfig& c, const Overrides& o, const std::string& command) {
    json raw = c.canonical;
    if (o.dim) {
        if (command == "verify-algebra") raw["algebra"]["dim"] = *o.dim;
        else raw["hilbert"]["dim"] = *o.dim;
    }
    if (o.seed) raw["algebra"]["seed"] = *o.seed;
    if (o.tol) raw["steady"]["tol"] = *o.tol;
    return parse_config(raw);
}

// ---------------------------------------------------------------------------
// Construction of library objects from the canonical form

inline HilbertParams hilbert_params(const json& canonical) {
    const json& h = canonical.at("hilbert");
    HilbertParams hp{static_cast<int>(h.at("dim").get<std::int64_t>()), h.at("hbar").get<double>(),
                     h.at("mass").get<double>(), h.at("omega").get<double>()};
    hp.validate();
    return hp;
}

namespace detail {

inline Op hamiltonian_from(const json& h, const HilbertParams& hp) {
    const std::string kind = h.at("kind").get<std::string>();
    if (kind == "oscillator") return oscillator_hamiltonian(hp);
    if (kind == "oscillator_qp") return oscillator_hamiltonian(hp, OscillatorMode::from_qp);
    if (kind == "squeezed") return squeezed_hamiltonian(hp, {h.at("lambda").get<double>()});
    const int d = hp.dim;
    Matrix m = Matrix::Zero(d, d);
    if (kind == "diagonal") {
        for (int i = 0; i < d; ++i) m(i, i) = h.at("values")[static_cast<std::size_t>(i)].get<double>();
    } else {
        for (int r = 0; r < d; ++r)
            for (int k = 0; k < d; ++k) {
                const auto ur = static_cast<std::size_t>(r), uk = static_cast<std::size_t>(k);
                const double im = h.contains("im") ? h["im"][ur][uk].get<double>() : 0.0;
                m(r, k) = cplx{h.at("re")[ur][uk].get<double>(), im};
            }
    }
    Op out(std::move(m), "H");
    require_hermitian(out, "config hamiltonian");
    return out;
}

inline cplx complex_of(const json& v) {
    if (v.is_array()) return {v[0].get<double>(), v[1].get<double>()};
    return {v.get<double>(), 0.0};
}

inline std::vector<cplx> complex_vector(const json& arr) {
    std::vector<cplx> out;
    for (const auto& v : arr) out.push_back(complex_of(v));
    return out;
}

inline ScalarBiFunction bifunction_from(const json& n) {
    const std::string kind = n.at("kind").get<std::string>();
    if (kind == "polynomial") {
        bifunc::Polynomial p;
        for (const auto& row : n.at("a")) p.a.push_back(complex_vector(row));
        return p;
    }
    if (kind == "jordan_powers") return bifunc::Polynomial::from_jordan_powers(n.at("c").get<std::vector<double>>());
    if (kind == "cosine") return bifunc::Cosine{n.at("eps0").get<double>()};
    return bifunc::Affine{n.at("c0").get<double>(), n.at("c_left").get<double>(), n.at("c_right").get<double>()};
}

inline Op named_operator(const std::string& name, const HilbertParams& hp, const Op& h) {
    if (name == "H") return h;
    if (name == "I") return Op::identity(hp.dim);
    auto [q, p] = position_momentum(hp);
    return name == "q" ? q : p;
}

inline SuperOpRecipe recipe_from(const json& f, const HilbertParams& hp, const Op& h) {
    const std::string kind = f.at("kind").get<std::string>();
    if (kind == "lie") return recipe::LieOf{named_operator(f.at("x").get<std::string>(), hp, h)};
    if (kind == "lie_jordan")
        return recipe::LieJordanProduct{named_operator(f.at("x").get<std::string>(), hp, h),
                                        named_operator(f.at("y").get<std::string>(), hp, h)};
    return recipe::Identity{};
}

} // namespace detail

inline ModelSpec model_spec(const json& canonical) {
    if (!canonical.contains("model")) fail("model", "block is required for this command");
    const json& m = canonical.at("model");
    const HilbertParams hp = hilbert_params(canonical);
    const std::string name = m.at("name").get<std::string>();
    if (name == "closed") return model::Closed{detail::hamiltonian_from(m.at("hamiltonian"), hp), hp.hbar};
    if (name == "general_open") {
        const Op h = detail::hamiltonian_from(m.at("hamiltonian"), hp);
        model::GeneralOpen go{h, hp.hbar, {}};
        for (const auto& t : m.at("terms"))
            go.terms.push_back(OpenTerm{detail::recipe_from(t.at("f"), hp, h), detail::bifunction_from(t.at("n"))});
        return go;
    }
    if (name == "friction") {
        const auto nl = NonlinearParams::from_delta(hp, m.at("Delta").get<double>(), m.at("gamma").get<double>(),
                                                    m.at("beta").get<double>());
        return model::FrictionOscillator{hp, nl,
                                         m.at("form") == "superop" ? FrictionForm::superop : FrictionForm::commutator};
    }
    if (name == "cosine") return model::CosineOscillator{hp, m.at("eps0").get<double>()};
    if (name == "lindblad_poly") {
        model::LindbladPolynomial lp{detail::hamiltonian_from(m.at("hamiltonian"), hp), hp.hbar, {}};
        for (const auto& row : m.at("v")) lp.v.push_back(detail::complex_vector(row));
        return lp;
    }
    if (name == "brownian") {
        return model::BrownianGeneralized{hp, {m.at("lambda").get<double>()}, detail::complex_vector(m.at("a")),
                                          m.at("alpha").get<double>(), m.at("beta").get<double>()};
    }
    return model::FoldModel{hp, m.at("alpha0").get<double>(), m.at("alpha1").get<double>(), m.at("alpha2").get<double>()};
}

/// Copy of the canonical form with the field at `path` replaced by x.
inline json with_parameter(const json& canonical, const std::string& path, double x) {
    json out = canonical;
    json* target = detail::resolve(out, path);
    if (target == nullptr) fail("sweep.parameter", "path '" + path + "' does not address a field");
    *target = x;
    return out;
}

inline Op initial_state(const json& canonical, int d) {
    const json& in = canonical.at("evolve").at("initial_state");
    if (in.contains("fock_level")) {
        const auto n = in["fock_level"].get<std::int64_t>();
        if (n >= d) fail("evolve.initial_state.fock_level", "level outside the truncation");
        return fock_projector(d, static_cast<Eigen::Index>(n));
    }
    if (in.contains("mixture")) {
        const auto w = in["mixture"].get<std::vector<double>>();
        if (static_cast<int>(w.size()) > d) fail("evolve.initial_state.mixture", "more weights than levels");
        double sum = 0.0;
        for (double x : w) sum += x;
        Matrix rho = Matrix::Zero(d, d);
        for (std::size_t i = 0; i < w.size(); ++i) rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = w[i] / sum;
        return Op(std::move(rho));
    }
    const auto n = in["coherence"][0].get<std::int64_t>(), m = in["coherence"][1].get<std::int64_t>();
    if (n >= d || m >= d) fail("evolve.initial_state.coherence", "level outside the truncation");
    Vector psi = Vector::Zero(d);
    psi(n) = psi(m) = 1.0 / std::sqrt(2.0);
    return Op(psi * psi.adjoint());
}

inline CatastropheTemplate catastrophe_spec(const json& canonical) {
    if (!canonical.contains("catastrophe")) fail("catastrophe", "block is required for this command");
    const json& k = canonical.at("catastrophe");
    CatastropheTemplate t;
    t.family = detail::family_from_string(k.at("family").get<std::string>(), "catastrophe.family");
    t.n = static_cast<int>(k.at("n").get<std::int64_t>());
    t.a = k.at("a").get<std::vector<double>>();
    t.variables = static_cast<int>(k.at("variables").get<std::int64_t>());
    t.quadratic_signs = k.at("quadratic_signs").get<std::vector<int>>();
    return t;
}

} // namespace purestat::config
