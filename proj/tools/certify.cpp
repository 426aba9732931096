// certify: exact convergence/regularity certificates for subdivision schemes
// via minimum-cost network flow and rational linear programming.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "subdiv/certify.hpp"

using namespace subdiv;

namespace {

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + out_path);
    out << text;
}

DilationMatrix parse_dilation(const std::string& text) {
    std::vector<long> entries;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) entries.push_back(std::stol(part));
    const int s = [&] {
        for (int k = 1; k <= 8; ++k)
            if (static_cast<std::size_t>(k) * k == entries.size()) return k;
        throw std::invalid_argument("--dilation needs s*s comma-separated integers");
    }();
    return DilationMatrix(s, std::move(entries));
}

Box parse_box(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("--box needs 'lo1,lo2:hi1,hi2'");
    auto coords = [](const std::string& t) {
        std::vector<long> v;
        std::stringstream in(t);
        std::string part;
        while (std::getline(in, part, ',')) v.push_back(std::stol(part));
        return MultiIndex(std::move(v));
    };
    return Box{coords(text.substr(0, colon)), coords(text.substr(colon + 1))};
}

ThresholdRule parse_rule(const std::string& preset, const std::vector<std::string>& thresholds) {
    ThresholdRule rule;
    if (preset == "c1-halved")
        rule.preset = ThresholdRule::Preset::c1_halved;
    else if (preset == "convergence" || preset.empty())
        rule.preset = ThresholdRule::Preset::convergence;
    else
        throw std::invalid_argument("unknown preset '" + preset + "'");
    for (const std::string& t : thresholds) {
        auto at = t.find('@');
        if (at == std::string::npos) throw std::invalid_argument("--threshold needs 'p/q@r'");
        rule.thresholds.emplace_back(std::stoi(t.substr(at + 1)), Rational::parse(t.substr(0, at)));
    }
    return rule;
}

int run(int argc, char** argv) {
    CLI::App app{"exact regularity certificates for subdivision schemes"};
    app.require_subcommand(1);

    std::string mask_path, out_path, graph_path, op_text = "nabla", format = "text";
    std::string dilation_text, box_text, diff_mask_path, preset = "convergence";
    std::vector<std::string> thresholds;
    int level = 1;

    auto add_common = [&](CLI::App* cmd, bool needs_mask) {
        if (needs_mask) cmd->add_option("--mask", mask_path, "mask file")->required();
        cmd->add_option("--out", out_path, "write output to a file instead of stdout");
        return cmd;
    };

    auto* cosets = app.add_subcommand("cosets", "coset representatives of Z^s / M^r Z^s");
    cosets->add_option("--dilation", dilation_text, "s*s integers, row-major")->required();
    cosets->add_option("--level,-r", level, "power r of the dilation");
    add_common(cosets, false);

    auto* iterate = app.add_subcommand("iterate", "iterated mask of the r-fold operator");
    iterate->add_option("--level,-r", level, "iteration count");
    add_common(iterate, true);

    auto* sumrules = app.add_subcommand("sumrules", "order-1 sum rule check");
    add_common(sumrules, true);

    auto* diffmask = app.add_subcommand("diffmask", "solve for a difference mask");
    diffmask->add_option("--operator", op_text, "difference operator");
    diffmask->add_option("--level,-r", level, "level r");
    diffmask->add_option("--box", box_text, "support box 'lo1,lo2:hi1,hi2'");
    add_common(diffmask, true);

    auto* norm = app.add_subcommand("norm", "non-restricted norm of the r-fold operator of a mask");
    norm->add_option("--level,-r", level, "iteration count");
    add_common(norm, true);

    auto* restricted = app.add_subcommand("restricted-norm", "restricted norm at level r");
    restricted->add_option("--operator", op_text, "difference operator");
    restricted->add_option("--level,-r", level, "level r");
    restricted->add_option("--diff-mask", diff_mask_path, "difference mask file (else solved)");
    restricted->add_option("--box", box_text, "support box for the solve step");
    add_common(restricted, true);

    auto* optimal = app.add_subcommand("optimal-mask", "assemble the optimal difference mask at level r");
    optimal->add_option("--operator", op_text, "difference operator");
    optimal->add_option("--level,-r", level, "level r");
    optimal->add_option("--diff-mask", diff_mask_path, "difference mask file (else solved)");
    optimal->add_option("--box", box_text, "support box for the solve step");
    add_common(optimal, true);

    auto* flow = app.add_subcommand("flow", "min-cost flow on a standalone graph file");
    flow->add_option("--graph", graph_path, "graph file")->required();
    add_common(flow, false);

    auto* analyze_cmd = app.add_subcommand("analyze", "full certificate");
    analyze_cmd->add_option("--operator", op_text, "difference operator");
    analyze_cmd->add_option("--level,-r,-R", level, "max level R");
    analyze_cmd->add_option("--diff-mask", diff_mask_path, "difference mask file (else solved)");
    analyze_cmd->add_option("--box", box_text, "support box for the solve step");
    analyze_cmd->add_option("--preset", preset, "threshold preset: convergence | c1-halved");
    analyze_cmd->add_option("--threshold", thresholds, "explicit thresholds 'p/q@r' (repeatable)");
    analyze_cmd->add_option("--format", format, "text | kv");
    add_common(analyze_cmd, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    std::ostringstream os;
    if (cosets->parsed()) {
        const DilationMatrix M = parse_dilation(dilation_text);
        for (const MultiIndex& eps : coset_representatives(M, level)) os << eps.str() << "\n";
    } else if (iterate->parsed()) {
        os << serialize_mask(iterate_mask(parse_mask_file(mask_path), level));
    } else if (sumrules->parsed()) {
        const SumRuleReport rep = check_sum_rules_order1(parse_mask_file(mask_path));
        for (const auto& [eps, sum] : rep.coset_sums) os << "coset " << eps.str() << " sum = " << sum.str() << "\n";
        os << "sum rules of order 1: " << (rep.satisfied ? "ok" : "FAIL") << "\n";
        emit(os.str(), out_path);
        return rep.satisfied ? 0 : 1;
    } else if (diffmask->parsed()) {
        const Mask A = parse_mask_file(mask_path);
        const DifferenceOperator T = OperatorSpec::parse(op_text).instantiate(A.dim(), A.rows());
        const Box box = box_text.empty() ? default_difference_support(A, T, level) : parse_box(box_text);
        const Mask B = construct_difference_mask(A, T, level, box);
        os << serialize_mask(B);
    } else if (norm->parsed()) {
        os << "norm = " << operator_norm(parse_mask_file(mask_path), level).str() << "\n";
    } else if (restricted->parsed() || optimal->parsed() || analyze_cmd->parsed()) {
        const Mask A = parse_mask_file(mask_path);
        AnalysisConfig config;
        config.max_level = level;
        config.op = OperatorSpec::parse(op_text);
        if (!diff_mask_path.empty()) config.difference_mask = parse_mask_file(diff_mask_path);
        if (!box_text.empty()) config.support_box = parse_box(box_text);
        config.rule = parse_rule(preset, thresholds);
        config.format = format == "kv" ? AnalysisConfig::Format::kv : AnalysisConfig::Format::text;
        const Certificate cert = analyze(A, config);
        if (!cert.sum_rules_ok) {
            emit(cert.conclusion + "\n", out_path);
            return 1;
        }
        if (restricted->parsed()) {
            const LevelReport& lv = cert.levels.back();
            for (const SubproblemReport& sub : lv.breakdown)
                os << "eps=" << sub.eps.str() << " j=" << sub.j << " value = " << sub.value.str() << "\n";
            os << "restricted norm = " << lv.norm.str() << "\n";
        } else if (optimal->parsed()) {
            os << serialize_mask(cert.levels.back().optimal_mask);
        } else {
            os << render_certificate(cert, config.format);
        }
    } else if (flow->parsed()) {
        const GraphInstance inst = parse_graph_file(graph_path);
        const auto b = divergence(inst.graph, inst.weights);
        const FlowSolution sol = solve_min_cost_flow(inst.graph, b);
        os << "value = " << sol.value.str() << "\n";
        for (int e = 0; e < inst.graph.edge_count(); ++e) {
            auto [u, v] = inst.graph.edge(e);
            if (sol.forward[e].sign() > 0)
                os << "f " << inst.graph.vertex(u).str() << " -> " << inst.graph.vertex(v).str() << " = "
                   << sol.forward[e].str() << "\n";
            if (sol.reverse[e].sign() > 0)
                os << "f " << inst.graph.vertex(v).str() << " -> " << inst.graph.vertex(u).str() << " = "
                   << sol.reverse[e].str() << "\n";
        }
        Rational dual(0);
        for (int v = 0; v < inst.graph.vertex_count(); ++v) {
            if (!sol.potential[v].is_zero())
                os << "x " << inst.graph.vertex(v).str() << " = " << sol.potential[v].str() << "\n";
            dual += b[v] * sol.potential[v];
        }
        os << "dual value = " << dual.str() << "\n";
        const EdgeWeights dstar = extract_optimal_d(inst.graph, sol);
        for (int e = 0; e < inst.graph.edge_count(); ++e) {
            auto [u, v] = inst.graph.edge(e);
            if (!dstar.d[e].is_zero())
                os << "d* " << inst.graph.vertex(u).str() << " -> " << inst.graph.vertex(v).str() << " = "
                   << dstar.d[e].str() << "\n";
        }
    }
    emit(os.str(), out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const NoSolutionError& e) {
        std::cerr << "analysis failed: " << e.what() << "\n";
        if (!e.coset_sums.empty()) {
            std::cerr << "sum rules of order 1: " << (e.sum_rules_ok ? "ok (box too small?)" : "FAIL") << "\n";
            for (const auto& [eps, sum] : e.coset_sums)
                std::cerr << "  coset " << eps.str() << " sum " << sum.str() << "\n";
        }
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
