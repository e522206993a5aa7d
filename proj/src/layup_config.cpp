#include "lamgen/layup_config.hpp"

#include "lamgen/format.hpp"

#include <charconv>
#include <limits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace lamgen {

std::string ConfigError::format(const std::string& field, int line, const std::string& what) {
    std::string s = "config";
    if (line > 0) s += ":" + std::to_string(line);
    if (!field.empty()) s += ": " + field;
    return s + ": " + what;
}

double LaminateSpec::ply_z_lo(int i) const noexcept {
    double z = 0.0;
    for (int k = 0; k < i; ++k) z += plies[static_cast<std::size_t>(k)].h + t_d;
    return z;
}

double LaminateSpec::total_thickness() const noexcept {
    if (plies.empty()) return 0.0;
    return ply_z_hi(ply_count() - 1);
}

bool LaminateSpec::operator==(const LaminateSpec& o) const {
    return W == o.W && L == o.L && plies == o.plies && t_f == o.t_f && t_m == o.t_m && t_d == o.t_d &&
           symmetric == o.symmetric && tol.coincidence_eps == o.tol.coincidence_eps &&
           tol.area_threshold == o.tol.area_threshold && tol.angle_eps == o.tol.angle_eps;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

struct Entry {
    std::string value;
    int line = 0;
};

double parse_double(std::string_view v, const std::string& field, int line) {
    v = trim(v);
    if (v == "inf") return std::numeric_limits<double>::infinity();
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
        throw ConfigError(field, line, "expected a number, got '" + std::string(v) + "'");
    return out;
}

int parse_int(std::string_view v, const std::string& field, int line) {
    v = trim(v);
    int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
        throw ConfigError(field, line, "expected an integer, got '" + std::string(v) + "'");
    return out;
}

bool parse_bool(std::string_view v, const std::string& field, int line) {
    v = trim(v);
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    throw ConfigError(field, line, "expected a boolean, got '" + std::string(v) + "'");
}

std::string fmt_double(double v) { return format_double(v); }

// Section -> key -> entry, plus the raw ply rows.
struct Document {
    std::map<std::string, std::map<std::string, Entry>> sections;
    std::vector<std::pair<std::vector<std::string>, int>> ply_rows;
};

Document tokenize(std::string_view text) {
    Document doc;
    std::string section;
    int line_no = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view raw = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        auto line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("", line_no, "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            static const char* known[] = {"laminate", "plies", "material", "solver", "mesh", "tolerances"};
            bool ok = false;
            for (auto* k : known) ok = ok || section == k;
            if (!ok) throw ConfigError(section, line_no, "unknown section");
            doc.sections[section];
            continue;
        }
        if (section.empty()) throw ConfigError("", line_no, "content before the first section header");
        if (section == "plies") {
            std::vector<std::string> cols;
            std::istringstream is{std::string(line)};
            for (std::string c; is >> c;) cols.push_back(c);
            doc.ply_rows.emplace_back(std::move(cols), line_no);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(section, line_no, "expected 'key = value'");
        std::string key(trim(line.substr(0, eq)));
        std::string val(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError(section, line_no, "empty key");
        auto& sec = doc.sections[section];
        if (sec.count(key)) throw ConfigError(section + "." + key, line_no, "duplicate key");
        sec[key] = {val, line_no};
    }
    return doc;
}

// Consumes known keys from a section and reports leftovers as unknown.
class SectionReader {
public:
    SectionReader(Document& doc, std::string name) : name_(std::move(name)) {
        if (auto it = doc.sections.find(name_); it != doc.sections.end()) entries_ = &it->second;
    }
    ~SectionReader() noexcept(false) {
        if (entries_ && !entries_->empty() && std::uncaught_exceptions() == 0) {
            const auto& [k, e] = *entries_->begin();
            throw ConfigError(name_ + "." + k, e.line, "unknown key");
        }
    }
    SectionReader(const SectionReader&) = delete;
    SectionReader& operator=(const SectionReader&) = delete;

    std::optional<Entry> take(const std::string& key) {
        if (!entries_) return std::nullopt;
        auto it = entries_->find(key);
        if (it == entries_->end()) return std::nullopt;
        Entry e = it->second;
        entries_->erase(it);
        return e;
    }
    void number(const std::string& key, double& dst, bool required = false) {
        if (auto e = take(key)) dst = parse_double(e->value, field(key), e->line);
        else if (required) throw ConfigError(field(key), 0, "missing required key");
    }
    void integer(const std::string& key, int& dst) {
        if (auto e = take(key)) dst = parse_int(e->value, field(key), e->line);
    }
    void boolean(const std::string& key, bool& dst) {
        if (auto e = take(key)) dst = parse_bool(e->value, field(key), e->line);
    }
    std::string field(const std::string& key) const { return name_ + "." + key; }

private:
    std::string name_;
    std::map<std::string, Entry>* entries_ = nullptr;
};

std::vector<double> parse_list(const std::string& v, const std::string& field, int line) {
    std::vector<double> out;
    std::string s = v;
    for (char& c : s)
        if (c == ',' || c == '[' || c == ']') c = ' ';
    std::istringstream is(s);
    for (std::string tok; is >> tok;) out.push_back(parse_double(tok, field, line));
    return out;
}

void require_positive(double v, const std::string& field) {
    if (!(v > 0.0) || std::isnan(v)) throw ConfigError(field, 0, "must be > 0 (got " + fmt_double(v) + ")");
}

}  // namespace

void apply_tolerance_overrides(Tolerances& tol) {
    auto env = [](const char* name, double& dst) {
        if (const char* v = std::getenv(name); v && *v) {
            char* end = nullptr;
            const double x = std::strtod(v, &end);
            if (end == v || *end != '\0') throw ConfigError(name, 0, "environment override is not a number");
            dst = x;
        }
    };
    env("LAMGEN_COINCIDENCE_EPS", tol.coincidence_eps);
    env("LAMGEN_AREA_THRESHOLD", tol.area_threshold);
    env("LAMGEN_ANGLE_EPS", tol.angle_eps);
}

void validate(Config& cfg) {
    auto& lam = cfg.laminate;
    auto& warn = cfg.warnings;
    require_positive(lam.W, "laminate.W");
    require_positive(lam.L, "laminate.L");
    require_positive(lam.t_f, "laminate.t_f");
    require_positive(lam.t_m, "laminate.t_m");
    require_positive(lam.t_d, "laminate.t_d");
    if (lam.plies.empty()) throw ConfigError("plies", 0, "N must be >= 1");
    require_positive(lam.tol.coincidence_eps, "tolerances.coincidence_eps");
    require_positive(lam.tol.area_threshold, "tolerances.area_threshold");
    require_positive(lam.tol.angle_eps, "tolerances.angle_eps");
    const double min_thick = std::min({lam.t_f, lam.t_m, lam.t_d});
    if (lam.tol.coincidence_eps > 1e-2 * min_thick)
        warn.push_back("coincidence_eps is not small relative to the thinnest cracklet");

    for (std::size_t i = 0; i < lam.plies.size(); ++i) {
        const auto& p = lam.plies[i];
        const std::string f = "plies[" + std::to_string(i + 1) + "]";
        if (!(p.theta_deg >= -90.0 && p.theta_deg <= 90.0))
            throw ConfigError(f + ".theta", 0, "must lie in [-90, 90] degrees (got " + fmt_double(p.theta_deg) + ")");
        require_positive(p.h, f + ".h");
        require_positive(p.d, f + ".d");
        if (p.yarn_cracklets) require_positive(p.l, f + ".l");
        if (lam.t_m / p.d > 0.1)
            warn.push_back(f + ": interface thickness not small relative to crack spacing (t_m/d = " +
                           fmt_double(lam.t_m / p.d) + ")");
        if (p.yarn_cracklets && lam.t_f / p.l > 0.1)
            warn.push_back(f + ": yarn cracklet thickness not small relative to fracture spacing (t_f/l = " +
                           fmt_double(lam.t_f / p.l) + ")");
    }

    const auto& m = cfg.material;
    const std::pair<const char*, double> positives[] = {
        {"rho", m.rho},   {"E11", m.E11},   {"E22", m.E22},     {"E33", m.E33},       {"G12", m.G12},
        {"G13", m.G13},   {"G23", m.G23},   {"nu12", m.nu12},   {"nu13", m.nu13},     {"nu23", m.nu23},
        {"S11", m.S11},   {"eps11_0", m.eps11_0}, {"eps11_u", m.eps11_u}, {"Tn", m.Tn}, {"Ts", m.Ts},
        {"G_IC", m.G_IC}, {"G_IIC", m.G_IIC}, {"Kn", m.Kn},     {"Ks", m.Ks},         {"Kt", m.Kt},
        {"eta", m.eta},   {"le", m.le}};
    for (const auto& [k, v] : positives) require_positive(v, std::string("material.") + k);
    if (m.Ne < 1) throw ConfigError("material.Ne", 0, "must be >= 1");
    if (!(m.eps11_u > m.eps11_0)) throw ConfigError("material.eps11_u", 0, "must exceed eps11_0");
    if (m.G_IIC < m.G_IC) throw ConfigError("material.G_IIC", 0, "must be >= G_IC");
    if (std::abs(m.eps11_0 - m.S11 / m.E11) > 0.01 * (m.S11 / m.E11))
        warn.push_back("material: eps11_0 differs from S11/E11 by more than 1%");
    // Positive-definite orthotropic compliance.
    {
        const double nu21 = m.nu12 * m.E22 / m.E11, nu31 = m.nu13 * m.E33 / m.E11, nu32 = m.nu23 * m.E33 / m.E22;
        const double det = 1.0 - m.nu12 * nu21 - m.nu23 * nu32 - m.nu13 * nu31 - 2.0 * nu21 * nu32 * m.nu13;
        if (!(det > 0.0) || m.nu12 * m.nu12 >= m.E11 / m.E22 || m.nu23 * m.nu23 >= m.E22 / m.E33 ||
            m.nu13 * m.nu13 >= m.E11 / m.E33)
            throw ConfigError("material.nu12", 0, "Poisson ratios give a non positive-definite compliance");
    }

    const auto& s = cfg.solver;
    if (!(s.ke_se_limit > 0.0 && s.ke_se_limit < 1.0)) throw ConfigError("solver.ke_se_limit", 0, "must lie in (0, 1)");
    require_positive(s.duration, "solver.duration");
    require_positive(s.target_dt, "solver.target_dt");
    if (s.damping < 0.0) throw ConfigError("solver.damping", 0, "must be >= 0");
    if (s.output_frames < 1) throw ConfigError("solver.output_frames", 0, "must be >= 1");
    if (s.rescale_interval < 1) throw ConfigError("solver.rescale_interval", 0, "must be >= 1");
    if (s.threads < 1) throw ConfigError("solver.threads", 0, "must be >= 1");
    if (s.load_curve.size() < 2) throw ConfigError("solver.load_curve", 0, "needs at least two control points");
    for (std::size_t i = 1; i < s.load_curve.size(); ++i) {
        if (!(s.load_curve[i].time_fraction > s.load_curve[i - 1].time_fraction))
            throw ConfigError("solver.load_curve", 0, "time fractions must be strictly increasing");
        if (s.load_curve[i].amplitude < s.load_curve[i - 1].amplitude)
            throw ConfigError("solver.load_curve", 0, "amplitudes must be non-decreasing");
    }

    require_positive(cfg.mesh.yarn_size, "mesh.yarn_size");
    require_positive(cfg.mesh.interface_size, "mesh.interface_size");
    if (cfg.mesh.ply_layers < 1) throw ConfigError("mesh.ply_layers", 0, "must be >= 1");

    cfg.symmetry.reset();
    if (lam.symmetric) cfg.symmetry = SymmetryPlane{lam.total_thickness()};
}

Config load_spec(std::string_view text) {
    Document doc = tokenize(text);
    Config cfg;
    auto& lam = cfg.laminate;
    {
        SectionReader r(doc, "laminate");
        r.number("W", lam.W, true);
        r.number("L", lam.L, true);
        r.number("t_f", lam.t_f, true);
        r.number("t_m", lam.t_m, true);
        r.number("t_d", lam.t_d, true);
        r.boolean("symmetric", lam.symmetric);
        int n = -1;
        r.integer("N", n);
        // Column-array form: theta = [..], h = [..], ... as an alternative to [plies].
        std::map<std::string, std::vector<double>> arrays;
        int array_line = 0;
        for (const char* k : {"theta", "h", "d", "l"}) {
            if (auto e = r.take(k)) {
                arrays[k] = parse_list(e->value, r.field(k), e->line);
                array_line = e->line;
            }
        }
        if (!arrays.empty()) {
            if (!doc.ply_rows.empty()) throw ConfigError("plies", array_line, "give plies either as arrays or as a table");
            const int count = n >= 0 ? n : static_cast<int>(arrays.begin()->second.size());
            for (const char* k : {"theta", "h", "d", "l"}) {
                auto it = arrays.find(k);
                if (it == arrays.end()) throw ConfigError(std::string("laminate.") + k, 0, "missing ply array");
                if (static_cast<int>(it->second.size()) != count)
                    throw ConfigError(std::string("laminate.") + k, array_line,
                                      "array length " + std::to_string(it->second.size()) + " does not match N = " +
                                          std::to_string(count));
            }
            for (int i = 0; i < count; ++i) {
                PlySpec p;
                p.theta_deg = arrays["theta"][static_cast<std::size_t>(i)];
                p.h = arrays["h"][static_cast<std::size_t>(i)];
                p.d = arrays["d"][static_cast<std::size_t>(i)];
                p.l = arrays["l"][static_cast<std::size_t>(i)];
                lam.plies.push_back(p);
            }
        }
        if (!doc.ply_rows.empty() || arrays.empty()) {
            for (const auto& [cols, line] : doc.ply_rows) {
                if (cols.size() != 4 && cols.size() != 5)
                    throw ConfigError("plies", line, "expected 'theta h d l [yarn_cracklets]'");
                PlySpec p;
                p.theta_deg = parse_double(cols[0], "plies.theta", line);
                p.h = parse_double(cols[1], "plies.h", line);
                p.d = parse_double(cols[2], "plies.d", line);
                p.l = parse_double(cols[3], "plies.l", line);
                if (cols.size() == 5) p.yarn_cracklets = parse_bool(cols[4], "plies.yarn_cracklets", line);
                lam.plies.push_back(p);
            }
            if (n >= 0 && n != lam.ply_count())
                throw ConfigError("laminate.N", 0, "N = " + std::to_string(n) + " but " +
                                                       std::to_string(lam.ply_count()) + " plies listed");
        }
        if (auto e = r.take("yarn_cracklets")) {
            auto flags = parse_list(e->value, r.field("yarn_cracklets"), e->line);
            if (flags.size() != lam.plies.size())
                throw ConfigError("laminate.yarn_cracklets", e->line, "array length does not match N");
            for (std::size_t i = 0; i < flags.size(); ++i) lam.plies[i].yarn_cracklets = flags[i] != 0.0;
        }
    }
    {
        SectionReader r(doc, "tolerances");
        r.number("coincidence_eps", lam.tol.coincidence_eps);
        r.number("area_threshold", lam.tol.area_threshold);
        r.number("angle_eps", lam.tol.angle_eps);
    }
    apply_tolerance_overrides(lam.tol);
    {
        auto& m = cfg.material;
        SectionReader r(doc, "material");
        for (auto [k, dst] : std::initializer_list<std::pair<const char*, double*>>{
                 {"rho", &m.rho},     {"E11", &m.E11},     {"E22", &m.E22},     {"E33", &m.E33},
                 {"G12", &m.G12},     {"G13", &m.G13},     {"G23", &m.G23},     {"nu12", &m.nu12},
                 {"nu13", &m.nu13},   {"nu23", &m.nu23},   {"S11", &m.S11},     {"eps11_0", &m.eps11_0},
                 {"eps11_u", &m.eps11_u}, {"Tn", &m.Tn},   {"Ts", &m.Ts},       {"G_IC", &m.G_IC},
                 {"G_IIC", &m.G_IIC}, {"Kn", &m.Kn},       {"Ks", &m.Ks},       {"Kt", &m.Kt},
                 {"eta", &m.eta},     {"le", &m.le}})
            r.number(k, *dst);
        r.integer("Ne", m.Ne);
        if (auto e = r.take("strength_reduction")) {
            if (e->value == "approximate") m.reduction = StrengthReduction::Approximate;
            else if (e->value == "exact") m.reduction = StrengthReduction::Exact;
            else if (e->value == "none") m.reduction = StrengthReduction::None;
            else throw ConfigError("material.strength_reduction", e->line, "expected approximate, exact or none");
        }
    }
    {
        auto& s = cfg.solver;
        SectionReader r(doc, "solver");
        r.number("total_displacement", s.total_displacement);
        r.number("duration", s.duration);
        r.number("target_dt", s.target_dt);
        r.boolean("mass_scaling", s.mass_scaling);
        r.integer("rescale_interval", s.rescale_interval);
        r.number("damping", s.damping);
        r.integer("output_frames", s.output_frames);
        r.number("ke_se_limit", s.ke_se_limit);
        r.integer("threads", s.threads);
        if (auto e = r.take("load_curve")) {
            auto v = parse_list(e->value, r.field("load_curve"), e->line);
            if (v.size() % 2 != 0 || v.size() < 4)
                throw ConfigError("solver.load_curve", e->line, "expected pairs 't0 a0, t1 a1, ...'");
            s.load_curve.clear();
            for (std::size_t i = 0; i < v.size(); i += 2) s.load_curve.push_back({v[i], v[i + 1]});
        }
    }
    {
        auto& m = cfg.mesh;
        SectionReader r(doc, "mesh");
        r.number("yarn_size", m.yarn_size);
        r.number("interface_size", m.interface_size);
        r.integer("ply_layers", m.ply_layers);
    }
    validate(cfg);
    return cfg;
}

Config load_spec_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path, 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_spec(ss.str());
}

std::string serialize_spec(const Config& cfg) {
    const auto& lam = cfg.laminate;
    const auto& m = cfg.material;
    const auto& s = cfg.solver;
    std::ostringstream o;
    o << "# lamgen configuration, format 1. Lengths in mm, angles in degrees.\n";
    o << "[laminate]\n";
    o << "W = " << fmt_double(lam.W) << "\n";
    o << "L = " << fmt_double(lam.L) << "\n";
    o << "t_f = " << fmt_double(lam.t_f) << "\n";
    o << "t_m = " << fmt_double(lam.t_m) << "\n";
    o << "t_d = " << fmt_double(lam.t_d) << "\n";
    o << "symmetric = " << (lam.symmetric ? "true" : "false") << "\n\n";
    o << "[plies]\n# theta_deg h d l yarn_cracklets\n";
    for (const auto& p : lam.plies)
        o << fmt_double(p.theta_deg) << " " << fmt_double(p.h) << " " << fmt_double(p.d) << " " << fmt_double(p.l)
          << " " << (p.yarn_cracklets ? "on" : "off") << "\n";
    o << "\n[tolerances]\n";
    o << "coincidence_eps = " << fmt_double(lam.tol.coincidence_eps) << "\n";
    o << "area_threshold = " << fmt_double(lam.tol.area_threshold) << "\n";
    o << "angle_eps = " << fmt_double(lam.tol.angle_eps) << "\n";
    o << "\n[material]\n";
    const std::pair<const char*, double> mats[] = {
        {"rho", m.rho},   {"E11", m.E11},     {"E22", m.E22},   {"E33", m.E33},   {"G12", m.G12},
        {"G13", m.G13},   {"G23", m.G23},     {"nu12", m.nu12}, {"nu13", m.nu13}, {"nu23", m.nu23},
        {"S11", m.S11},   {"eps11_0", m.eps11_0}, {"eps11_u", m.eps11_u}, {"Tn", m.Tn}, {"Ts", m.Ts},
        {"G_IC", m.G_IC}, {"G_IIC", m.G_IIC}, {"Kn", m.Kn},     {"Ks", m.Ks},     {"Kt", m.Kt},
        {"eta", m.eta},   {"le", m.le}};
    for (const auto& [k, v] : mats) o << k << " = " << fmt_double(v) << "\n";
    o << "Ne = " << m.Ne << "\n";
    o << "strength_reduction = "
      << (m.reduction == StrengthReduction::Approximate ? "approximate"
          : m.reduction == StrengthReduction::Exact    ? "exact"
                                                       : "none")
      << "\n";
    o << "\n[solver]\n";
    o << "total_displacement = " << fmt_double(s.total_displacement) << "\n";
    o << "duration = " << fmt_double(s.duration) << "\n";
    o << "target_dt = " << fmt_double(s.target_dt) << "\n";
    o << "mass_scaling = " << (s.mass_scaling ? "true" : "false") << "\n";
    o << "rescale_interval = " << s.rescale_interval << "\n";
    o << "damping = " << fmt_double(s.damping) << "\n";
    o << "output_frames = " << s.output_frames << "\n";
    o << "ke_se_limit = " << fmt_double(s.ke_se_limit) << "\n";
    o << "threads = " << s.threads << "\n";
    o << "load_curve = ";
    for (std::size_t i = 0; i < s.load_curve.size(); ++i)
        o << (i ? ", " : "") << fmt_double(s.load_curve[i].time_fraction) << " " << fmt_double(s.load_curve[i].amplitude);
    o << "\n\n[mesh]\n";
    o << "yarn_size = " << fmt_double(cfg.mesh.yarn_size) << "\n";
    o << "interface_size = " << fmt_double(cfg.mesh.interface_size) << "\n";
    o << "ply_layers = " << cfg.mesh.ply_layers << "\n";
    return o.str();
}

}  // namespace lamgen
