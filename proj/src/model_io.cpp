#include "hrcm/model_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hrcm {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fnv1a_hex(const std::string &bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

namespace {

std::string trim(const std::string &s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_num(const std::string &s, const std::string &key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("model file: bad number for '" + key + "'");
    }
}

std::vector<std::pair<double, double>> parse_pairs(const std::string &s,
                                                   const std::string &key) {
    std::vector<std::pair<double, double>> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("model file: expected a:b pairs in '" + key + "'");
        out.emplace_back(parse_num(trim(item.substr(0, colon)), key),
                         parse_num(trim(item.substr(colon + 1)), key));
    }
    return out;
}

std::string pairs_to_string(const std::vector<std::pair<double, double>> &ps) {
    std::string s;
    for (std::size_t i = 0; i < ps.size(); i++) {
        if (i) s += ",";
        s += format_double(ps[i].first) + ":" + format_double(ps[i].second);
    }
    return s;
}

} // namespace

AdjacencyModel parse_model(const std::string &text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("model file: expected 'key = value': " + line);
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto need = [&](const std::string &key) -> const std::string & {
        auto it = kv.find(key);
        if (it == kv.end())
            throw std::invalid_argument("model file: missing key '" + key + "'");
        return it->second;
    };
    auto get = [&](const std::string &key, const std::string &dflt) {
        auto it = kv.find(key);
        return it == kv.end() ? dflt : it->second;
    };

    AdjacencyModel m;
    m.d = static_cast<int>(parse_num(need("dimension"), "dimension"));

    const std::string mk = need("marks.kind");
    if (mk == "finite") {
        m.marks = MarkSpace::finite(parse_pairs(need("marks.finite"), "marks.finite"));
    } else if (mk == "unit_interval") {
        if (get("marks.graded", "0") == "1") {
            m.marks = MarkSpace::unit_interval_graded(
                static_cast<int>(parse_num(need("marks.graded_cells"), "marks.graded_cells")),
                static_cast<int>(parse_num(need("marks.graded_per_cell"), "marks.graded_per_cell")));
        } else {
            m.marks = MarkSpace::unit_interval(
                static_cast<int>(parse_num(need("marks.grid"), "marks.grid")));
        }
    } else {
        throw std::invalid_argument("model file: unknown marks.kind '" + mk + "'");
    }

    const std::string bk = need("base.kind");
    if (bk == "boolean") {
        m.base = BaseKind::BooleanDisc;
    } else if (bk == "weight_dependent") {
        m.base = BaseKind::WeightDependent;
        const std::string pk = need("profile.kind");
        if (pk == "indicator") {
            m.profile.kind = ProfileKind::Indicator;
            m.profile.cut = parse_num(need("profile.cut"), "profile.cut");
        } else if (pk == "exp_decay") {
            m.profile.kind = ProfileKind::ExpDecay;
            m.profile.rate = parse_num(need("profile.rate"), "profile.rate");
        } else if (pk == "power_tail") {
            m.profile.kind = ProfileKind::PowerTail;
            m.profile.exponent = parse_num(need("profile.exponent"), "profile.exponent");
            m.profile.scale = parse_num(need("profile.scale"), "profile.scale");
        } else if (pk == "table") {
            m.profile.kind = ProfileKind::Table;
            m.profile.table = parse_pairs(need("profile.table"), "profile.table");
        } else {
            throw std::invalid_argument("model file: unknown profile.kind '" + pk + "'");
        }
        const std::string kk = need("kernel.kind");
        if (kk == "product") m.kernel.kind = KernelKind::Product;
        else if (kk == "strong") m.kernel.kind = KernelKind::Strong;
        else if (kk == "sum") m.kernel.kind = KernelKind::Sum;
        else if (kk == "weak") m.kernel.kind = KernelKind::Weak;
        else if (kk == "pref_attach") m.kernel.kind = KernelKind::PrefAttach;
        else if (kk == "constant") m.kernel.kind = KernelKind::Constant;
        else throw std::invalid_argument("model file: unknown kernel.kind '" + kk + "'");
        if (m.kernel.kind == KernelKind::Constant)
            m.kernel.value = parse_num(need("kernel.value"), "kernel.value");
        else
            m.kernel.zeta = parse_num(need("kernel.zeta"), "kernel.zeta");
    } else if (bk == "radial_table") {
        m.base = BaseKind::RadialTable;
        for (int t = 0;; t++) {
            auto it = kv.find("table." + std::to_string(t));
            if (it == kv.end()) break;
            m.tables.push_back(parse_pairs(it->second, "table"));
        }
        if (m.tables.empty())
            throw std::invalid_argument("model file: radial_table needs table.0");
    } else if (bk == "dyadic_annuli") {
        m.base = BaseKind::DyadicAnnuli;
    } else {
        throw std::invalid_argument("model file: unknown base.kind '" + bk + "'");
    }

    const std::string sk = need("scaling.kind");
    if (sk == "identity") {
        m.scaling = ScalingFunction::identity(m.d);
    } else if (sk == "volume_linear") {
        m.scaling = ScalingFunction::volume_linear(
            m.d, parse_num(need("scaling.L"), "scaling.L"));
    } else if (sk == "length_linear") {
        m.scaling = ScalingFunction::length_linear(
            m.d, parse_num(need("scaling.L"), "scaling.L"));
    } else if (sk == "annulus") {
        m.scaling = ScalingFunction::annulus(
            m.d, parse_num(need("scaling.L"), "scaling.L"));
    } else if (sk == "many_annuli") {
        m.scaling = ScalingFunction::many_annuli(
            m.d, parse_num(need("scaling.L"), "scaling.L"),
            parse_num(need("scaling.R"), "scaling.R"));
    } else {
        throw std::invalid_argument("model file: unknown scaling.kind '" + sk + "'");
    }

    m.validate();
    return m;
}

AdjacencyModel load_model(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

std::string serialize_model(const AdjacencyModel &m) {
    std::ostringstream out;
    out << "dimension = " << m.d << "\n";
    if (m.marks.kind == MarkKind::Finite) {
        out << "marks.kind = finite\n";
        std::vector<std::pair<double, double>> vw;
        for (std::size_t i = 0; i < m.marks.size(); i++)
            vw.emplace_back(m.marks.values[i], m.marks.weights[i]);
        out << "marks.finite = " << pairs_to_string(vw) << "\n";
    } else if (m.marks.graded) {
        out << "marks.kind = unit_interval\n";
        out << "marks.graded = 1\n";
        out << "marks.graded_cells = " << m.marks.graded_cells << "\n";
        out << "marks.graded_per_cell = " << m.marks.graded_per_cell << "\n";
    } else {
        out << "marks.kind = unit_interval\n";
        out << "marks.grid = " << m.marks.grid_size << "\n";
    }
    switch (m.base) {
        case BaseKind::BooleanDisc:
            out << "base.kind = boolean\n";
            break;
        case BaseKind::WeightDependent: {
            out << "base.kind = weight_dependent\n";
            switch (m.profile.kind) {
                case ProfileKind::Indicator:
                    out << "profile.kind = indicator\n";
                    out << "profile.cut = " << format_double(m.profile.cut) << "\n";
                    break;
                case ProfileKind::ExpDecay:
                    out << "profile.kind = exp_decay\n";
                    out << "profile.rate = " << format_double(m.profile.rate) << "\n";
                    break;
                case ProfileKind::PowerTail:
                    out << "profile.kind = power_tail\n";
                    out << "profile.exponent = " << format_double(m.profile.exponent) << "\n";
                    out << "profile.scale = " << format_double(m.profile.scale) << "\n";
                    break;
                case ProfileKind::Table:
                    out << "profile.kind = table\n";
                    out << "profile.table = " << pairs_to_string(m.profile.table) << "\n";
                    break;
            }
            switch (m.kernel.kind) {
                case KernelKind::Product: out << "kernel.kind = product\n"; break;
                case KernelKind::Strong: out << "kernel.kind = strong\n"; break;
                case KernelKind::Sum: out << "kernel.kind = sum\n"; break;
                case KernelKind::Weak: out << "kernel.kind = weak\n"; break;
                case KernelKind::PrefAttach: out << "kernel.kind = pref_attach\n"; break;
                case KernelKind::Constant: out << "kernel.kind = constant\n"; break;
            }
            if (m.kernel.kind == KernelKind::Constant)
                out << "kernel.value = " << format_double(m.kernel.value) << "\n";
            else
                out << "kernel.zeta = " << format_double(m.kernel.zeta) << "\n";
            break;
        }
        case BaseKind::RadialTable:
            out << "base.kind = radial_table\n";
            for (std::size_t t = 0; t < m.tables.size(); t++)
                out << "table." << t << " = " << pairs_to_string(m.tables[t]) << "\n";
            break;
        case BaseKind::DyadicAnnuli:
            out << "base.kind = dyadic_annuli\n";
            break;
    }
    switch (m.scaling.kind()) {
        case ScalingKind::Identity:
            out << "scaling.kind = identity\n";
            break;
        case ScalingKind::VolumeLinear:
            out << "scaling.kind = volume_linear\n";
            out << "scaling.L = " << format_double(m.scaling.L()) << "\n";
            break;
        case ScalingKind::LengthLinear:
            out << "scaling.kind = length_linear\n";
            out << "scaling.L = " << format_double(m.scaling.L()) << "\n";
            break;
        case ScalingKind::AnnulusExample:
            out << "scaling.kind = annulus\n";
            out << "scaling.L = " << format_double(m.scaling.L()) << "\n";
            break;
        case ScalingKind::ManyAnnuliExample:
            out << "scaling.kind = many_annuli\n";
            out << "scaling.L = " << format_double(m.scaling.L()) << "\n";
            out << "scaling.R = " << format_double(m.scaling.R_param()) << "\n";
            break;
    }
    return out.str();
}

} // namespace hrcm
