#include "nmqrt/app/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nmqrt/errors.hpp"

namespace nmqrt::app {

namespace pt = boost::property_tree;

namespace {

bool same(const op::Operator& a, const op::Operator& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}
bool same(const std::optional<op::Operator>& a, const std::optional<op::Operator>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || same(*a, *b);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& raw, const std::string& field) {
    const std::string s = trim(raw);
    if (s.empty()) throw ConfigError(field, "expected a number, got an empty value");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
        throw ConfigError(field, "expected a finite number, got '" + s + "'");
    return v;
}

int to_int(const std::string& raw, const std::string& field) {
    const double v = to_double(raw, field);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(field, "expected an integer, got '" + trim(raw) + "'");
    return static_cast<int>(v);
}

bool to_bool(const std::string& raw, const std::string& field) {
    const std::string s = trim(raw);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(field, "expected true/false, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
    return s;
}

std::vector<cd> parse_pairs(const std::string& text, const std::string& field) {
    std::vector<cd> out;
    std::size_t i = 0;
    const std::string s = text;
    while (true) {
        while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',' || s[i] == ';' ||
                                s[i] == '[' || s[i] == ']'))
            ++i;
        if (i >= s.size()) break;
        if (s[i] != '(') throw ConfigError(field, "expected '(' at offset " + std::to_string(i));
        const auto close = s.find(')', i);
        if (close == std::string::npos) throw ConfigError(field, "unterminated '(' at offset " + std::to_string(i));
        const std::string body = s.substr(i + 1, close - i - 1);
        const auto comma = body.find(',');
        if (comma == std::string::npos) throw ConfigError(field, "pair '(" + body + ")' needs re,im");
        out.emplace_back(to_double(body.substr(0, comma), field), to_double(body.substr(comma + 1), field));
        i = close + 1;
    }
    return out;
}

} // namespace

bool ModelSpec::operator==(const ModelSpec& o) const {
    return preset == o.preset && omega_a == o.omega_a && coupling == o.coupling && same(hamiltonian, o.hamiltonian) &&
           same(coupling_matrix, o.coupling_matrix);
}

bool StateSpec::operator==(const StateSpec& o) const {
    if (preset != o.preset || vector.has_value() != o.vector.has_value() || !same(density, o.density)) return false;
    return !vector || (vector->size() == o.vector->size() && (vector->array() == o.vector->array()).all());
}

bool RunConfig::operator==(const RunConfig& o) const {
    if (!(model == o.model && bath == o.bath && state == o.state && run == o.run && spectrum == o.spectrum &&
          oracle == o.oracle && output == o.output && sweep == o.sweep))
        return false;
    if (operators.size() != o.operators.size()) return false;
    for (const auto& [k, v] : operators) {
        auto it = o.operators.find(k);
        if (it == o.operators.end() || !same(v, it->second)) return false;
    }
    return true;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

op::Operator parse_matrix(const std::string& text, const std::string& field) {
    const auto v = parse_pairs(text, field);
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (v.empty() || static_cast<std::size_t>(d * d) != v.size())
        throw ConfigError(field, "matrix needs d*d (re,im) pairs, got " + std::to_string(v.size()));
    op::Operator m(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c) m(r, c) = v[static_cast<std::size_t>(r * d + c)];
    return m;
}

op::State parse_vector(const std::string& text, const std::string& field) {
    const auto v = parse_pairs(text, field);
    if (v.empty()) throw ConfigError(field, "vector needs at least one (re,im) pair");
    op::State s(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) s(static_cast<Eigen::Index>(i)) = v[i];
    return s;
}

std::string format_matrix(const op::Operator& m) {
    std::string s;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            s += (s.empty() ? "" : " ") + std::string("(") + format_double(m(r, c).real()) + "," +
                 format_double(m(r, c).imag()) + ")";
    return s;
}

std::string format_vector(const op::State& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        s += (s.empty() ? "" : " ") + std::string("(") + format_double(v(i).real()) + "," + format_double(v(i).imag()) + ")";
    return s;
}

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config", std::string("line ") + std::to_string(e.line()) + ": " + e.message());
    }
    RunConfig c;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    auto section = [&](const std::string& name, const pt::ptree& sec, const std::map<std::string, Setter>& keys) {
        for (const auto& [k, v] : sec) {
            const std::string field = name + "." + k;
            if (!v.empty()) throw ConfigError(field, "nested keys are not supported");
            auto it = keys.find(k);
            if (it == keys.end()) throw ConfigError(field, "unknown key");
            it->second(v.data(), field);
        }
    };
    for (const auto& [name, sec] : tree) {
        if (sec.empty() && !sec.data().empty()) throw ConfigError(name, "top-level keys must live in a section");
        if (name == "model") {
            section(name, sec,
                    {{"preset", [&](const std::string& v, const std::string&) { c.model.preset = trim(v); }},
                     {"omega_a", [&](const std::string& v, const std::string& f) { c.model.omega_a = to_double(v, f); }},
                     {"coupling", [&](const std::string& v, const std::string&) { c.model.coupling = trim(v); }},
                     {"hamiltonian", [&](const std::string& v, const std::string& f) { c.model.hamiltonian = parse_matrix(v, f); }},
                     {"coupling_matrix",
                      [&](const std::string& v, const std::string& f) { c.model.coupling_matrix = parse_matrix(v, f); }}});
        } else if (name == "bath") {
            section(name, sec,
                    {{"gamma", [&](const std::string& v, const std::string& f) { c.bath.gamma = to_double(v, f); }},
                     {"cutoff", [&](const std::string& v, const std::string& f) { c.bath.cutoff = to_double(v, f); }},
                     {"ohmicity", [&](const std::string& v, const std::string& f) { c.bath.ohmicity = to_int(v, f); }},
                     {"kT", [&](const std::string& v, const std::string& f) { c.bath.kT = to_double(v, f); }},
                     {"quad_rel_tol", [&](const std::string& v, const std::string& f) { c.bath.quad_rel_tol = to_double(v, f); }}});
        } else if (name == "state") {
            section(name, sec,
                    {{"preset", [&](const std::string& v, const std::string&) { c.state.preset = trim(v); }},
                     {"vector", [&](const std::string& v, const std::string& f) { c.state.vector = parse_vector(v, f); }},
                     {"density", [&](const std::string& v, const std::string& f) { c.state.density = parse_matrix(v, f); }}});
        } else if (name == "run") {
            section(name, sec,
                    {{"t2", [&](const std::string& v, const std::string& f) { c.run.t2 = to_double(v, f); }},
                     {"t1_end", [&](const std::string& v, const std::string& f) { c.run.t1_end = to_double(v, f); }},
                     {"step", [&](const std::string& v, const std::string& f) { c.run.step = to_double(v, f); }},
                     {"modes", [&](const std::string& v, const std::string&) { c.run.modes = split_list(v); }},
                     {"pairs", [&](const std::string& v, const std::string&) { c.run.pairs = split_list(v); }}});
        } else if (name == "spectrum") {
            section(name, sec,
                    {{"pair", [&](const std::string& v, const std::string&) { c.spectrum.pair = trim(v); }},
                     {"t_max", [&](const std::string& v, const std::string& f) { c.spectrum.t_max = to_double(v, f); }},
                     {"omega_max", [&](const std::string& v, const std::string& f) { c.spectrum.omega_max = to_double(v, f); }},
                     {"points", [&](const std::string& v, const std::string& f) { c.spectrum.points = to_int(v, f); }},
                     {"taper", [&](const std::string& v, const std::string&) { c.spectrum.taper = trim(v); }},
                     {"input", [&](const std::string& v, const std::string&) { c.spectrum.input = trim(v); }}});
        } else if (name == "oracle") {
            section(name, sec,
                    {{"enabled", [&](const std::string& v, const std::string& f) { c.oracle.enabled = to_bool(v, f); }},
                     {"modes", [&](const std::string& v, const std::string& f) { c.oracle.modes = to_int(v, f); }},
                     {"fock_cutoff", [&](const std::string& v, const std::string& f) { c.oracle.fock_cutoff = to_int(v, f); }},
                     {"omega_max", [&](const std::string& v, const std::string& f) { c.oracle.omega_max = to_double(v, f); }},
                     {"engine_mode", [&](const std::string& v, const std::string&) { c.oracle.engine_mode = trim(v); }},
                     {"engine_bath", [&](const std::string& v, const std::string&) { c.oracle.engine_bath = trim(v); }},
                     {"gammas",
                      [&](const std::string& v, const std::string& f) {
                          c.oracle.gammas.clear();
                          for (const auto& x : split_list(v)) c.oracle.gammas.push_back(to_double(x, f));
                      }},
                     {"tail_tol", [&](const std::string& v, const std::string& f) { c.oracle.tail_tol = to_double(v, f); }},
                     {"raise_cutoffs", [&](const std::string& v, const std::string& f) { c.oracle.raise_cutoffs = to_bool(v, f); }},
                     {"sample_dt", [&](const std::string& v, const std::string& f) { c.oracle.sample_dt = to_double(v, f); }}});
        } else if (name == "output") {
            section(name, sec,
                    {{"dir", [&](const std::string& v, const std::string&) { c.output.dir = trim(v); }},
                     {"prefix", [&](const std::string& v, const std::string&) { c.output.prefix = trim(v); }}});
        } else if (name == "sweep") {
            section(name, sec,
                    {{"parameter", [&](const std::string& v, const std::string&) { c.sweep.parameter = trim(v); }},
                     {"values",
                      [&](const std::string& v, const std::string& f) {
                          c.sweep.values.clear();
                          for (const auto& x : split_list(v)) c.sweep.values.push_back(to_double(x, f));
                      }}});
        } else if (name.rfind("operator.", 0) == 0 && name.size() > 9) {
            const std::string op_name = name.substr(9);
            section(name, sec, {{"matrix", [&](const std::string& v, const std::string& f) {
                                     c.operators[op_name] = parse_matrix(v, f);
                                 }}});
            if (!c.operators.count(op_name)) throw ConfigError(name + ".matrix", "missing");
        } else {
            throw ConfigError(name, "unknown section");
        }
    }
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("--config", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream o;
    auto kv = [&](const std::string& k, const std::string& v) { o << k << " = " << v << "\n"; };
    o << "[model]\n";
    kv("preset", c.model.preset);
    kv("omega_a", format_double(c.model.omega_a));
    kv("coupling", c.model.coupling);
    if (c.model.hamiltonian) kv("hamiltonian", format_matrix(*c.model.hamiltonian));
    if (c.model.coupling_matrix) kv("coupling_matrix", format_matrix(*c.model.coupling_matrix));
    o << "\n[bath]\n";
    kv("gamma", format_double(c.bath.gamma));
    kv("cutoff", format_double(c.bath.cutoff));
    kv("ohmicity", std::to_string(c.bath.ohmicity));
    kv("kT", format_double(c.bath.kT));
    kv("quad_rel_tol", format_double(c.bath.quad_rel_tol));
    o << "\n[state]\n";
    kv("preset", c.state.preset);
    if (c.state.vector) kv("vector", format_vector(*c.state.vector));
    if (c.state.density) kv("density", format_matrix(*c.state.density));
    o << "\n[run]\n";
    kv("t2", format_double(c.run.t2));
    kv("t1_end", format_double(c.run.t1_end));
    kv("step", format_double(c.run.step));
    kv("modes", join(c.run.modes));
    kv("pairs", join(c.run.pairs));
    o << "\n[spectrum]\n";
    kv("pair", c.spectrum.pair);
    kv("t_max", format_double(c.spectrum.t_max));
    kv("omega_max", format_double(c.spectrum.omega_max));
    kv("points", std::to_string(c.spectrum.points));
    kv("taper", c.spectrum.taper);
    kv("input", c.spectrum.input);
    o << "\n[oracle]\n";
    kv("enabled", c.oracle.enabled ? "true" : "false");
    kv("modes", std::to_string(c.oracle.modes));
    kv("fock_cutoff", std::to_string(c.oracle.fock_cutoff));
    kv("omega_max", format_double(c.oracle.omega_max));
    kv("engine_mode", c.oracle.engine_mode);
    kv("engine_bath", c.oracle.engine_bath);
    {
        std::vector<std::string> g;
        for (double x : c.oracle.gammas) g.push_back(format_double(x));
        kv("gammas", join(g));
    }
    kv("tail_tol", format_double(c.oracle.tail_tol));
    kv("raise_cutoffs", c.oracle.raise_cutoffs ? "true" : "false");
    kv("sample_dt", format_double(c.oracle.sample_dt));
    o << "\n[output]\n";
    kv("dir", c.output.dir);
    kv("prefix", c.output.prefix);
    o << "\n[sweep]\n";
    kv("parameter", c.sweep.parameter);
    {
        std::vector<std::string> v;
        for (double x : c.sweep.values) v.push_back(format_double(x));
        kv("values", join(v));
    }
    for (const auto& [name, m] : c.operators) {
        o << "\n[operator." << name << "]\n";
        kv("matrix", format_matrix(m));
    }
    return o.str();
}

SystemModel build_model(const RunConfig& c) {
    SystemModel m;
    if (c.model.preset == "two_level") {
        if (c.model.hamiltonian) throw ConfigError("model.hamiltonian", "only allowed with preset = custom");
        m.hamiltonian = 0.5 * c.model.omega_a * op::sigma_z();
    } else if (c.model.preset == "custom") {
        if (!c.model.hamiltonian) throw ConfigError("model.hamiltonian", "required with preset = custom");
        m.hamiltonian = *c.model.hamiltonian;
    } else {
        throw ConfigError("model.preset", "unknown preset '" + c.model.preset + "' (two_level, custom)");
    }
    if (c.model.coupling == "custom") {
        if (!c.model.coupling_matrix) throw ConfigError("model.coupling_matrix", "required with coupling = custom");
        m.coupling = *c.model.coupling_matrix;
    } else {
        if (c.model.coupling_matrix) throw ConfigError("model.coupling_matrix", "only allowed with coupling = custom");
        try {
            m.coupling = coupling_matrix(coupling_from_string(c.model.coupling));
        } catch (const InvalidInput&) {
            throw ConfigError("model.coupling", "unknown coupling '" + c.model.coupling +
                                                    "' (sigma_minus, sigma_z, sigma_x, custom)");
        }
        if (m.coupling.rows() != m.hamiltonian.rows())
            throw ConfigError("model.coupling", "preset couplings are two-level; use coupling = custom");
    }
    try {
        m.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError("model", e.what());
    }
    return m;
}

bath::SpectralDensity build_spectral_density(const RunConfig& c) {
    bath::SpectralDensity sd;
    sd.gamma = c.bath.gamma;
    sd.cutoff = c.bath.cutoff;
    sd.ohmicity = c.bath.ohmicity;
    if (!(sd.gamma >= 0.0) || !std::isfinite(sd.gamma)) throw ConfigError("bath.gamma", "must be finite and >= 0");
    if (!(sd.cutoff > 0.0) || !std::isfinite(sd.cutoff)) throw ConfigError("bath.cutoff", "must be finite and > 0");
    if (sd.ohmicity < 1) throw ConfigError("bath.ohmicity", "must be a positive integer");
    sd.validate();
    return sd;
}

DensityMatrix build_state(const RunConfig& c) {
    const Eigen::Index d = build_model(c).dim();
    const std::string& p = c.state.preset;
    auto need_two = [&] {
        if (d != 2) throw ConfigError("state.preset", "'" + p + "' is a two-level preset");
    };
    try {
        if (p == "fig1") {
            need_two();
            op::State psi(2);
            psi << std::sqrt(3.0) / 2.0, 0.5;
            return DensityMatrix::pure(psi);
        }
        if (p == "fig1d") {
            // populations of the fig1 state, coherences reduced to a quarter
            need_two();
            op::Operator r(2, 2);
            const double off = 0.25 * std::sqrt(3.0) / 4.0;
            r << 0.75, off, off, 0.25;
            return DensityMatrix(r);
        }
        if (p == "excited" || p == "ground") {
            need_two();
            op::State psi = op::State::Zero(2);
            psi(p == "excited" ? 0 : 1) = 1.0;
            return DensityMatrix::pure(psi);
        }
        if (p == "mixed") return DensityMatrix::maximally_mixed(d);
        if (p == "vector") {
            if (!c.state.vector) throw ConfigError("state.vector", "required with preset = vector");
            if (c.state.vector->size() != d) throw ConfigError("state.vector", "dimension differs from the model");
            return DensityMatrix::pure(*c.state.vector);
        }
        if (p == "density") {
            if (!c.state.density) throw ConfigError("state.density", "required with preset = density");
            if (c.state.density->rows() != d) throw ConfigError("state.density", "dimension differs from the model");
            return DensityMatrix(*c.state.density);
        }
    } catch (const InvalidInput& e) {
        throw ConfigError("state", e.what());
    }
    throw ConfigError("state.preset", "unknown preset '" + p + "' (fig1, fig1d, excited, ground, mixed, vector, density)");
}

std::vector<coef::EvolutionMode> build_modes(const RunConfig& c) {
    std::vector<coef::EvolutionMode> out;
    for (const auto& m : c.run.modes) {
        if (m == "all") {
            for (auto x : {coef::EvolutionMode::markov_qrt, coef::EvolutionMode::non_markov_qrt,
                           coef::EvolutionMode::non_markov_full})
                if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
            continue;
        }
        coef::EvolutionMode em;
        try {
            em = coef::mode_from_string(m);
        } catch (const InvalidInput&) {
            throw ConfigError("run.modes", "unknown mode '" + m + "' (markov-qrt, nm-qrt, nm-full, all)");
        }
        if (std::find(out.begin(), out.end(), em) == out.end()) out.push_back(em);
    }
    if (out.empty()) throw ConfigError("run.modes", "no mode selected");
    return out;
}

op::Operator resolve_operator(const RunConfig& c, const std::string& name) {
    auto it = c.operators.find(name);
    if (it != c.operators.end()) return it->second;
    const Eigen::Index d = build_model(c).dim();
    if (name == "id") return op::identity(d);
    if (d == 2) {
        if (name == "sp") return op::sigma_plus();
        if (name == "sm") return op::sigma_minus();
        if (name == "sz") return op::sigma_z();
        if (name == "sx") return op::sigma_x();
        if (name == "sy") return op::sigma_y();
    }
    throw ConfigError("run.pairs", "unknown operator '" + name + "'");
}

std::vector<std::pair<std::string, std::string>> build_pairs(const RunConfig& c) {
    std::vector<std::pair<std::string, std::string>> out;
    const Eigen::Index d = build_model(c).dim();
    for (const auto& p : c.run.pairs) {
        if (p == "all") {
            if (d != 2) throw ConfigError("run.pairs", "'all' needs a two-level model");
            for (const char* a : {"sp", "sm", "sz"})
                for (const char* b : {"sp", "sm", "sz"}) out.emplace_back(a, b);
            continue;
        }
        const auto colon = p.find(':');
        if (colon == std::string::npos) throw ConfigError("run.pairs", "expected A:B, got '" + p + "'");
        out.emplace_back(trim(p.substr(0, colon)), trim(p.substr(colon + 1)));
        for (const auto& n : {out.back().first, out.back().second}) {
            const auto m = resolve_operator(c, n);
            if (m.rows() != d) throw ConfigError("operator." + n, "dimension differs from the model");
        }
    }
    if (out.empty()) throw ConfigError("run.pairs", "no operator pair selected");
    return out;
}

spectrum::Taper build_taper(const RunConfig& c) {
    if (c.spectrum.taper == "rectangular") return spectrum::Taper::rectangular;
    if (c.spectrum.taper == "cosine_tail") return spectrum::Taper::cosine_tail;
    throw ConfigError("spectrum.taper", "unknown taper '" + c.spectrum.taper + "' (rectangular, cosine_tail)");
}

spectrum::Input build_input(const RunConfig& c) {
    if (c.spectrum.input == "complex") return spectrum::Input::complex;
    if (c.spectrum.input == "real_part") return spectrum::Input::real_part;
    throw ConfigError("spectrum.input", "unknown input '" + c.spectrum.input + "' (complex, real_part)");
}

void set_parameter(RunConfig& c, const std::string& key, double v) {
    auto as_int = [&](int& dst) {
        if (v != std::floor(v)) throw ConfigError("sweep.values", key + " needs integer values");
        dst = static_cast<int>(v);
    };
    if (key == "bath.gamma") c.bath.gamma = v;
    else if (key == "bath.cutoff") c.bath.cutoff = v;
    else if (key == "bath.kT") c.bath.kT = v;
    else if (key == "bath.ohmicity") as_int(c.bath.ohmicity);
    else if (key == "model.omega_a") c.model.omega_a = v;
    else if (key == "run.t2") c.run.t2 = v;
    else if (key == "run.t1_end") c.run.t1_end = v;
    else if (key == "run.step") c.run.step = v;
    else if (key == "oracle.modes") as_int(c.oracle.modes);
    else if (key == "oracle.fock_cutoff") as_int(c.oracle.fock_cutoff);
    else if (key == "oracle.omega_max") c.oracle.omega_max = v;
    else throw ConfigError("sweep.parameter", "unsupported sweep key '" + key + "'");
}

void validate(const RunConfig& c) {
    build_model(c);
    build_spectral_density(c);
    if (!(c.bath.kT >= 0.0)) throw ConfigError("bath.kT", "must be >= 0");
    if (!(c.bath.quad_rel_tol > 0.0 && c.bath.quad_rel_tol < 1e-2)) throw ConfigError("bath.quad_rel_tol", "must lie in (0, 1e-2)");
    build_state(c);
    if (!(c.run.t2 >= 0.0)) throw ConfigError("run.t2", "must be >= 0");
    if (!(c.run.t1_end >= c.run.t2)) throw ConfigError("run.t1_end", "must be >= run.t2");
    if (!(c.run.step >= 0.0)) throw ConfigError("run.step", "must be >= 0 (0 selects the default)");
    build_modes(c);
    build_pairs(c);
    const auto colon = c.spectrum.pair.find(':');
    if (colon == std::string::npos) throw ConfigError("spectrum.pair", "expected A:B");
    resolve_operator(c, trim(c.spectrum.pair.substr(0, colon)));
    resolve_operator(c, trim(c.spectrum.pair.substr(colon + 1)));
    if (!(c.spectrum.t_max > 0.0)) throw ConfigError("spectrum.t_max", "must be > 0");
    if (!(c.spectrum.omega_max > 0.0)) throw ConfigError("spectrum.omega_max", "must be > 0");
    if (c.spectrum.points < 3) throw ConfigError("spectrum.points", "must be >= 3");
    build_taper(c);
    build_input(c);
    if (c.oracle.modes < 0) throw ConfigError("oracle.modes", "must be >= 0");
    if (c.oracle.fock_cutoff < 1) throw ConfigError("oracle.fock_cutoff", "must be >= 1");
    if (!(c.oracle.omega_max >= 0.0)) throw ConfigError("oracle.omega_max", "must be >= 0");
    if (!(c.oracle.tail_tol > 0.0)) throw ConfigError("oracle.tail_tol", "must be > 0");
    if (!(c.oracle.sample_dt > 0.0)) throw ConfigError("oracle.sample_dt", "must be > 0");
    if (c.oracle.engine_bath != "discrete" && c.oracle.engine_bath != "continuum")
        throw ConfigError("oracle.engine_bath", "expected discrete or continuum");
    try {
        coef::mode_from_string(c.oracle.engine_mode);
    } catch (const InvalidInput&) {
        throw ConfigError("oracle.engine_mode", "unknown mode '" + c.oracle.engine_mode + "'");
    }
    for (double g : c.oracle.gammas)
        if (!(g >= 0.0)) throw ConfigError("oracle.gammas", "must be >= 0");
    if (c.output.prefix.empty() || c.output.prefix.find('/') != std::string::npos)
        throw ConfigError("output.prefix", "must be a non-empty file name stem");
    if (c.output.dir.empty()) throw ConfigError("output.dir", "must not be empty");
    if (!c.sweep.parameter.empty()) {
        if (c.sweep.values.empty()) throw ConfigError("sweep.values", "required with sweep.parameter");
        RunConfig probe = c;
        set_parameter(probe, c.sweep.parameter, c.sweep.values.front());
    }
}

} // namespace nmqrt::app
