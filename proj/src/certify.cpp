#include "subdiv/certify.hpp"

#include <cassert>
#include <fstream>
#include <set>
#include <sstream>

namespace subdiv {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Cursor {
    std::string origin;
    std::vector<std::string> lines;
    int lineno = 0;  // 1-based index of the line just fetched

    explicit Cursor(const std::string& text, std::string origin_) : origin(std::move(origin_)) {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
    }

    // next content line with comments and blanks stripped; empty when exhausted
    std::optional<std::string> next() {
        while (lineno < static_cast<int>(lines.size())) {
            std::string line = lines[lineno++];
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::size_t a = line.find_first_not_of(" \t\r");
            if (a == std::string::npos) continue;
            std::size_t b = line.find_last_not_of(" \t\r");
            return line.substr(a, b - a + 1);
        }
        return std::nullopt;
    }

    [[noreturn]] void fail(int col, const std::string& msg) const { throw ParseError(origin, lineno, col, msg); }
};

long parse_long(Cursor& cur, const std::string& text) {
    try {
        std::size_t used = 0;
        long v = std::stol(text, &used);
        if (used != text.size()) cur.fail(1, "trailing characters in integer '" + text + "'");
        return v;
    } catch (const std::logic_error&) {
        cur.fail(1, "expected integer, got '" + text + "'");
    }
}

// "key = value"; enforces the expected key
std::string expect_kv(Cursor& cur, const std::string& key) {
    auto line = cur.next();
    if (!line) cur.fail(1, "unexpected end of file, expected '" + key + " = ...'");
    auto eq = line->find('=');
    if (eq == std::string::npos) cur.fail(1, "expected '" + key + " = ...'");
    auto trim = [](std::string t) {
        std::size_t a = t.find_first_not_of(" \t");
        std::size_t b = t.find_last_not_of(" \t");
        return a == std::string::npos ? std::string() : t.substr(a, b - a + 1);
    };
    std::string k = trim(line->substr(0, eq));
    if (k != key) cur.fail(1, "expected key '" + key + "', got '" + k + "'");
    return trim(line->substr(eq + 1));
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

// "(a,b,...)" -> MultiIndex; col is the offset of '(' within the line (for errors)
MultiIndex parse_point(Cursor& cur, const std::string& text, int s) {
    if (text.size() < 2 || text.front() != '(' || text.back() != ')')
        cur.fail(1, "expected '(i1,...,is)', got '" + text + "'");
    std::vector<long> coords;
    for (const std::string& part : split(text.substr(1, text.size() - 2), ','))
        coords.push_back(parse_long(cur, part));
    if (s > 0 && static_cast<int>(coords.size()) != s)
        cur.fail(1, "point has " + std::to_string(coords.size()) + " coordinates, expected " + std::to_string(s));
    return MultiIndex(std::move(coords));
}

Rational parse_rational(Cursor& cur, const std::string& text) {
    try {
        return Rational::parse(text);
    } catch (const std::invalid_argument& e) {
        cur.fail(1, e.what());
    }
}

std::vector<std::string> tokens(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> out;
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

}  // namespace

Mask parse_mask_text(const std::string& text, const std::string& origin) {
    Cursor cur(text, origin);
    const int s = static_cast<int>(parse_long(cur, expect_kv(cur, "s")));
    const int n = static_cast<int>(parse_long(cur, expect_kv(cur, "n")));
    const int m = static_cast<int>(parse_long(cur, expect_kv(cur, "m")));
    if (s < 1) cur.fail(1, "s must be positive");
    if (n < 1 || m < 1) cur.fail(1, "n and m must be positive");
    const std::string dil = expect_kv(cur, "dilation");
    std::vector<long> entries;
    for (const std::string& part : split(dil, ',')) entries.push_back(parse_long(cur, part));
    if (static_cast<int>(entries.size()) != s * s) cur.fail(1, "dilation must have s*s entries");
    DilationMatrix M = [&]() {
        try {
            return DilationMatrix(s, entries);
        } catch (const std::invalid_argument& e) {
            cur.fail(1, e.what());
        }
    }();
    auto header = cur.next();
    if (!header || *header != "entries:") cur.fail(1, "expected 'entries:'");
    Mask mask(s, n, m, M);
    std::set<MultiIndex> seen;
    int count = 0;
    for (auto line = cur.next(); line; line = cur.next()) {
        auto eq = line->find('=');
        if (eq == std::string::npos) cur.fail(1, "expected '(point) = values'");
        std::string lhs = line->substr(0, eq);
        lhs.erase(lhs.find_last_not_of(" \t") + 1);
        const MultiIndex pos = parse_point(cur, lhs, s);
        if (!seen.insert(pos).second) cur.fail(1, "duplicate index " + pos.str());
        const std::vector<std::string> vals = tokens(line->substr(eq + 1));
        if (static_cast<int>(vals.size()) != n * m)
            cur.fail(1, "entry needs " + std::to_string(n * m) + " values, got " + std::to_string(vals.size()));
        RatMatrix block(n, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) block(i, j) = parse_rational(cur, vals[i * m + j]);
        mask.set(pos, std::move(block));
        ++count;
    }
    if (count == 0) cur.fail(1, "empty mask");
    return mask;
}

Mask parse_mask_file(const std::string& path) { return parse_mask_text(read_file(path), path); }

std::string serialize_mask(const Mask& m) {
    std::ostringstream os;
    os << "s = " << m.dim() << "\n";
    os << "n = " << m.rows() << "\n";
    os << "m = " << m.cols() << "\n";
    os << "dilation = " << m.dilation().str() << "\n";
    os << "entries:\n";
    for (const auto& [pos, mat] : m.entries()) {
        os << pos.str() << " =";
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) os << ' ' << mat(i, j).str();
        os << "\n";
    }
    return os.str();
}

void write_mask_file(const Mask& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << serialize_mask(m);
}

DifferenceOperator parse_operator_text(const std::string& text, const std::string& origin) {
    Cursor cur(text, origin);
    const int s = static_cast<int>(parse_long(cur, expect_kv(cur, "s")));
    const int q = static_cast<int>(parse_long(cur, expect_kv(cur, "q")));
    const int n = static_cast<int>(parse_long(cur, expect_kv(cur, "n")));
    if (s < 1 || q < 1 || n < 1) cur.fail(1, "s, q, n must be positive");
    auto header = cur.next();
    if (!header || *header != "stencil:") cur.fail(1, "expected 'stencil:'");
    DifferenceOperator T(s, n, q);
    int count = 0;
    for (auto line = cur.next(); line; line = cur.next()) {
        auto eq = line->find('=');
        if (eq == std::string::npos) cur.fail(1, "expected '(point) = values'");
        std::string lhs = line->substr(0, eq);
        lhs.erase(lhs.find_last_not_of(" \t") + 1);
        const MultiIndex pos = parse_point(cur, lhs, s);
        const std::vector<std::string> vals = tokens(line->substr(eq + 1));
        if (static_cast<int>(vals.size()) != q * n)
            cur.fail(1, "tap needs " + std::to_string(q * n) + " values, got " + std::to_string(vals.size()));
        RatMatrix block(q, n);
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < n; ++j) block(i, j) = parse_rational(cur, vals[i * n + j]);
        T.set_tap(pos, std::move(block));
        ++count;
    }
    if (count == 0) cur.fail(1, "empty stencil");
    return T;
}

DifferenceOperator parse_operator_file(const std::string& path) {
    return parse_operator_text(read_file(path), path);
}

GraphInstance parse_graph_text(const std::string& text, const std::string& origin) {
    Cursor cur(text, origin);
    std::vector<MultiIndex> vertices;
    std::vector<std::pair<MultiIndex, MultiIndex>> edges;
    std::vector<Rational> weights;
    for (auto line = cur.next(); line; line = cur.next()) {
        std::istringstream in(*line);
        std::string kind;
        in >> kind;
        if (kind == "vertex") {
            std::string pt;
            in >> pt;
            vertices.push_back(parse_point(cur, pt, 0));
        } else if (kind == "edge") {
            std::string from, arrow, to, dspec;
            in >> from >> arrow >> to >> dspec;
            if (arrow != "->") cur.fail(1, "expected 'edge (u) -> (v) d=value'");
            if (dspec.rfind("d=", 0) != 0) cur.fail(1, "expected 'd=value'");
            edges.emplace_back(parse_point(cur, from, 0), parse_point(cur, to, 0));
            weights.push_back(parse_rational(cur, dspec.substr(2)));
        } else {
            cur.fail(1, "expected 'vertex' or 'edge', got '" + kind + "'");
        }
    }
    if (vertices.empty()) cur.fail(1, "graph has no vertices");
    GraphInstance inst{LatticeGraph::from_lists(vertices, edges), EdgeWeights{std::move(weights)}};
    return inst;
}

GraphInstance parse_graph_file(const std::string& path) { return parse_graph_text(read_file(path), path); }

OperatorSpec OperatorSpec::parse(const std::string& text) {
    OperatorSpec spec;
    auto parse_dirs = [](const std::string& body) {
        std::vector<MultiIndex> dirs;
        for (const std::string& part : split(body, ';')) {
            std::vector<long> coords;
            for (const std::string& c : split(part, ',')) coords.push_back(std::stol(c));
            dirs.emplace_back(std::move(coords));
        }
        return dirs;
    };
    if (text == "nabla") {
        spec.kind = Kind::nabla;
    } else if (text == "nabla2") {
        spec.kind = Kind::nabla_k;
        spec.order = 2;
    } else if (text.rfind("nablak:", 0) == 0) {
        spec.kind = Kind::nabla_k;
        spec.order = std::stoi(text.substr(7));
    } else if (text.rfind("directions:", 0) == 0) {
        spec.kind = Kind::directional;
        spec.directions = parse_dirs(text.substr(11));
    } else if (text.rfind("directions2:", 0) == 0) {
        spec.kind = Kind::directional_pairs;
        spec.directions = parse_dirs(text.substr(12));
    } else if (text == "block") {
        spec.kind = Kind::block_preset;
    } else if (text.rfind("file:", 0) == 0) {
        spec.kind = Kind::file;
        spec.path = text.substr(5);
    } else {
        throw std::invalid_argument("unknown operator spec '" + text + "'");
    }
    return spec;
}

DifferenceOperator OperatorSpec::instantiate(int s, int n) const {
    switch (kind) {
        case Kind::nabla:
            return DifferenceOperator::nabla(s, n);
        case Kind::nabla_k:
            if (n != 1) throw std::invalid_argument("nabla_k operator needs a scalar mask");
            return DifferenceOperator::nabla_k(s, order);
        case Kind::directional:
            if (n != 1) throw std::invalid_argument("directional operator needs a scalar mask");
            return DifferenceOperator::directional(s, directions);
        case Kind::directional_pairs:
            if (n != 1) throw std::invalid_argument("directional-pairs operator needs a scalar mask");
            return DifferenceOperator::directional_pairs(s, directions);
        case Kind::block_preset:
            if (s != 2 || n != 2) throw std::invalid_argument("block preset is for s = 2, n = 2");
            return DifferenceOperator::gradient_identity_block();
        case Kind::file:
            return parse_operator_file(path);
    }
    throw std::logic_error("unreachable");
}

std::string OperatorSpec::describe() const {
    switch (kind) {
        case Kind::nabla:
            return "nabla";
        case Kind::nabla_k:
            return "nablak:" + std::to_string(order);
        case Kind::directional:
        case Kind::directional_pairs: {
            std::string body;
            for (std::size_t i = 0; i < directions.size(); ++i) {
                if (i) body += ';';
                std::string pt = directions[i].str();
                body += pt.substr(1, pt.size() - 2);
            }
            return (kind == Kind::directional ? "directions:" : "directions2:") + body;
        }
        case Kind::block_preset:
            return "block";
        case Kind::file:
            return "file:" + path;
    }
    return "?";
}

namespace {

std::string conclusion_for(const Certificate& cert, const ThresholdRule& rule) {
    for (const auto& [r, bound] : rule.thresholds)
        for (const LevelReport& lv : cert.levels)
            if (lv.r == r && lv.norm < bound)
                return "restricted norm " + lv.norm.str() + " < " + bound.str() + " at r=" +
                       std::to_string(r) + " => threshold satisfied";
    if (rule.preset == ThresholdRule::Preset::convergence) {
        for (const LevelReport& lv : cert.levels)
            if (lv.norm < Rational(1))
                return "restricted norm " + lv.norm.str() + " < 1 at r=" + std::to_string(lv.r) +
                       " => convergent";
        return "norm >= 1 for all r <= " + std::to_string(cert.max_level) + ": inconclusive";
    }
    for (const LevelReport& lv : cert.levels)
        if (lv.norm < Rational(1, 2))
            return "restricted norm " + lv.norm.str() + " < 1/2 at r=" + std::to_string(lv.r) +
                   " => C1 criterion satisfied";
    return "norm >= 1/2 for all r <= " + std::to_string(cert.max_level) + ": inconclusive";
}

std::string rule_name_for(const ThresholdRule& rule) {
    std::string name = rule.preset == ThresholdRule::Preset::convergence ? "convergence" : "c1-halved";
    for (const auto& [r, bound] : rule.thresholds) name += " " + bound.str() + "@" + std::to_string(r);
    return name;
}

}  // namespace

Certificate analyze(const Mask& A, const AnalysisConfig& config) {
    Certificate cert;
    cert.s = A.dim();
    cert.dilation = A.dilation().str();
    cert.operator_name = config.op.describe();
    cert.max_level = config.max_level;
    cert.rule_name = rule_name_for(config.rule);
    if (config.max_level < 1) throw std::invalid_argument("analyze: max level must be >= 1");
    for (const auto& [r, bound] : config.rule.thresholds)
        if (r < 1 || bound.sign() <= 0) throw std::invalid_argument("analyze: thresholds must be positive");

    if (A.rows() == 1 && A.cols() == 1) {
        cert.sum_rules_checked = true;
        SumRuleReport rep = check_sum_rules_order1(A);
        cert.sum_rules_ok = rep.satisfied;
        cert.coset_sums = std::move(rep.coset_sums);
        if (!cert.sum_rules_ok) {
            cert.conclusion = "not convergent: sum rules of order 1 fail";
            return cert;
        }
    }

    const DifferenceOperator T = config.op.instantiate(A.dim(), A.rows());
    const DifferenceScheme scheme = [&]() {
        if (config.difference_mask) {
            if (!verify_intertwining(A, *config.difference_mask, T, 1))
                throw std::invalid_argument("analyze: supplied difference mask fails the intertwining identity");
            return DifferenceScheme::make(A, T, 1, *config.difference_mask,
                                          DifferenceScheme::Provenance::user_supplied);
        }
        const Box box = config.support_box ? *config.support_box : default_difference_support(A, T, 1);
        return DifferenceScheme::make(A, T, 1, construct_difference_mask(A, T, 1, box),
                                      DifferenceScheme::Provenance::solved);
    }();
    const Mask& B1 = scheme.difference;

    const auto first_order = T.first_order_directions();
    for (int r = 1; r <= config.max_level; ++r) {
        const Mask Br = iterate_mask(B1, r);
        const std::vector<MultiIndex> reps = coset_representatives(A.dilation(), r);
        LevelReport level{r, Rational(0), {}, Mask(A.dim(), T.rows(), T.rows(), Br.dilation()), true, false};

        // shared subproblem geometry: K is the same for every (eps, j)
        const LpData probe = build_lp_data_from_iterated(Br, A.dilation(), r, reps.front(), 0);
        std::optional<LatticeGraph> graph;
        std::optional<ConstraintMatrix> delta;
        if (first_order)
            graph = LatticeGraph::difference_graph(probe.K, *first_order);
        else
            delta = build_delta_matrix(T, probe.K);

        std::vector<OptimalPiece> pieces;
        for (const MultiIndex& eps : reps)
            for (int j = 0; j < T.rows(); ++j) {
                const LpData data = build_lp_data_from_iterated(Br, A.dilation(), r, eps, j);
                SubproblemReport rep{eps, j + 1, Rational(0), data.l1_norm(), "", true};
                RatVector d_star;
                if (graph) {
                    const EdgeWeights w{data.d};
                    if (auto uni = univariate_fast_path(*graph, w)) {
                        rep.engine = "univariate";
                        rep.value = uni->value;
                        d_star = uni->d_star.d;
                    } else if (auto fast = signed_d_fast_path(*graph, w)) {
                        rep.engine = "signed";
                        rep.value = fast->value;
                        d_star = extract_optimal_d(*graph, *fast).d;
                    } else {
                        const FlowSolution flow = solve_min_cost_flow(*graph, divergence(*graph, w));
                        rep.engine = "ssp";
                        rep.value = flow.value;
                        d_star = extract_optimal_d(*graph, flow).d;
                    }
                } else {
                    const LpSolution lp = l1_nullspace_distance(data.d, *delta);
                    rep.engine = "lp";
                    rep.value = lp.value;
                    d_star = lp.d_star;
                }
                for (const auto& v : d_star)
                    if (!v.is_integer()) rep.d_star_integral = false;
                level.optimal_integral = level.optimal_integral && rep.d_star_integral;
                if (rep.value > level.norm) level.norm = rep.value;
                pieces.push_back(OptimalPiece{eps, j, data.K, data.q, std::move(d_star)});
                level.breakdown.push_back(std::move(rep));
            }

        level.optimal_mask = assemble_optimal_mask(pieces, A.dilation(), r, A.dim());
        assert(operator_norm(level.optimal_mask, 1) == level.norm &&
               "assembled mask norm equals the restricted norm");
        level.intertwining_ok = verify_intertwining(A, level.optimal_mask, T, r);
        assert(level.intertwining_ok && "assembled mask is a difference mask");
        cert.levels.push_back(std::move(level));
    }

    cert.conclusion = conclusion_for(cert, config.rule);
    return cert;
}

std::string render_certificate(const Certificate& c, AnalysisConfig::Format format) {
    std::ostringstream os;
    if (format == AnalysisConfig::Format::kv) {
        os << "s = " << c.s << "\n";
        os << "dilation = " << c.dilation << "\n";
        os << "operator = " << c.operator_name << "\n";
        os << "levels = " << c.max_level << "\n";
        os << "rule = " << c.rule_name << "\n";
        if (c.sum_rules_checked) {
            os << "sum_rules = " << (c.sum_rules_ok ? "ok" : "fail") << "\n";
            for (const auto& [eps, sum] : c.coset_sums)
                os << "coset_sum." << eps.str() << " = " << sum.str() << "\n";
        }
        for (const LevelReport& lv : c.levels) {
            const std::string p = "r" + std::to_string(lv.r);
            os << p << ".norm = " << lv.norm.str() << "\n";
            for (const SubproblemReport& sub : lv.breakdown) {
                const std::string sp = p + ".sub." + sub.eps.str() + ".j" + std::to_string(sub.j);
                os << sp << ".value = " << sub.value.str() << "\n";
                os << sp << ".d_l1 = " << sub.d_l1.str() << "\n";
                os << sp << ".engine = " << sub.engine << "\n";
                os << sp << ".dstar_integral = " << (sub.d_star_integral ? "true" : "false") << "\n";
            }
            os << p << ".optimal.integral = " << (lv.optimal_integral ? "true" : "false") << "\n";
            os << p << ".intertwining = " << (lv.intertwining_ok ? "ok" : "fail") << "\n";
            for (const auto& [pos, mat] : lv.optimal_mask.entries()) {
                os << p << ".optimal.entry." << pos.str() << " =";
                for (int i = 0; i < lv.optimal_mask.rows(); ++i)
                    for (int j = 0; j < lv.optimal_mask.cols(); ++j) os << ' ' << mat(i, j).str();
                os << "\n";
            }
        }
        os << "conclusion = " << c.conclusion << "\n";
        return os.str();
    }

    os << "analysis: s=" << c.s << " dilation=[" << c.dilation << "] operator=" << c.operator_name
       << " R=" << c.max_level << "\n";
    if (c.sum_rules_checked) {
        os << "sum rules of order 1: " << (c.sum_rules_ok ? "ok" : "FAIL") << "\n";
        for (const auto& [eps, sum] : c.coset_sums) os << "  coset " << eps.str() << " sum " << sum.str() << "\n";
    }
    for (const LevelReport& lv : c.levels) {
        os << "level r=" << lv.r << ": restricted norm = " << lv.norm.str() << "\n";
        for (const SubproblemReport& sub : lv.breakdown)
            os << "  eps=" << sub.eps.str() << " j=" << sub.j << ": value " << sub.value.str() << " (||d||_1 "
               << sub.d_l1.str() << ", " << sub.engine << (sub.d_star_integral ? ", integral d*" : "") << ")\n";
        os << "  optimal mask: " << lv.optimal_mask.entries().size() << " entries, "
           << (lv.optimal_integral ? "integral d*" : "non-integral d*") << ", intertwining "
           << (lv.intertwining_ok ? "ok" : "FAIL") << "\n";
    }
    os << "rule: " << c.rule_name << "\n";
    os << "conclusion: " << c.conclusion << "\n";
    return os.str();
}

}  // namespace subdiv
