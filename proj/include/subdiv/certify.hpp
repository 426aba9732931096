#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subdiv/difference.hpp"
#include "subdiv/l1lp.hpp"
#include "subdiv/mask.hpp"
#include "subdiv/netflow.hpp"

namespace subdiv {

struct ParseError : std::runtime_error {
    ParseError(const std::string& origin, int line_, int col_, const std::string& what_)
        : std::runtime_error(origin + ":" + std::to_string(line_) + ":" + std::to_string(col_) + ": " + what_),
          line(line_),
          col(col_) {}
    int line, col;
};

/// Line-oriented mask file: header "s = ...", "n = ...", "m = ...",
/// "dilation = ..." (s*s ints, row-major), then "entries:" and one line
/// "(i1,...,is) = r11 r12 ... rnm" per support point. '#' starts a comment.
Mask parse_mask_text(const std::string& text, const std::string& origin);
Mask parse_mask_file(const std::string& path);

/// Canonical form: fixed header order, support sorted lexicographically,
/// fractions in lowest terms. parse(serialize(m)) == m, and serializing a
/// parsed file reproduces the canonical form byte for byte.
std::string serialize_mask(const Mask& m);
void write_mask_file(const Mask& m, const std::string& path);

/// Operator file: header "s = ...", "q = ...", "n = ...", then "stencil:"
/// and one line "(i1,...,is) = <q*n entries row-major>" per tap.
DifferenceOperator parse_operator_text(const std::string& text, const std::string& origin);
DifferenceOperator parse_operator_file(const std::string& path);

/// Standalone flow instance: "vertex (coords)" lines and
/// "edge (coords) -> (coords) d=p/q" lines.
struct GraphInstance {
    LatticeGraph graph;
    EdgeWeights weights;
};
GraphInstance parse_graph_text(const std::string& text, const std::string& origin);
GraphInstance parse_graph_file(const std::string& path);

/// Which difference operator the analysis uses.
struct OperatorSpec {
    enum class Kind { nabla, nabla_k, directional, directional_pairs, block_preset, file };
    Kind kind = Kind::nabla;
    int order = 2;                       // nabla_k
    std::vector<MultiIndex> directions;  // directional, directional_pairs
    std::string path;                    // file

    /// Accepts "nabla", "nabla2", "nablak:<k>", "directions:<x,y;...>",
    /// "directions2:<x,y;...>", "block", "file:<path>".
    static OperatorSpec parse(const std::string& text);
    DifferenceOperator instantiate(int s, int n) const;
    std::string describe() const;
};

struct ThresholdRule {
    enum class Preset { convergence, c1_halved };
    Preset preset = Preset::convergence;
    bool preset_set = true;
    std::vector<std::pair<int, Rational>> thresholds;  // explicit (r, bound), checked first
};

struct AnalysisConfig {
    int max_level = 1;  // R
    OperatorSpec op;
    std::optional<Mask> difference_mask;  // user-supplied B at level 1
    std::optional<Box> support_box;       // for the construction step
    ThresholdRule rule;
    enum class Format { text, kv } format = Format::text;
};

struct SubproblemReport {
    MultiIndex eps;
    int j;  // 1-based in reports
    Rational value;
    Rational d_l1;
    std::string engine;  // "univariate" | "signed" | "ssp" | "lp"
    bool d_star_integral;
};

struct LevelReport {
    int r;
    Rational norm;
    std::vector<SubproblemReport> breakdown;
    Mask optimal_mask;
    bool optimal_integral;
    bool intertwining_ok;
};

struct Certificate {
    int s = 0;
    std::string dilation;
    std::string operator_name;
    int max_level = 0;
    bool sum_rules_checked = false;
    bool sum_rules_ok = true;
    std::vector<std::pair<MultiIndex, Rational>> coset_sums;
    std::vector<LevelReport> levels;
    std::string conclusion;
    std::string rule_name;
};

/// Full pipeline: sum rules, difference mask (given or solved), per-(r, eps, j)
/// optimization through the flow fast paths / SSP / LP, optimal mask assembly,
/// norms, threshold rule. Deterministic output.
Certificate analyze(const Mask& A, const AnalysisConfig& config);

std::string render_certificate(const Certificate& c, AnalysisConfig::Format format);

}  // namespace subdiv
