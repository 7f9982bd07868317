#pragma once

#include <string>
#include <vector>

#include "sde1d/spec.hpp"

namespace sde1d {

/// Result of the formal drift transformation between noise interpretations,
/// together with an audit of the trivial (constant, absorbing-state)
/// solutions it destroys or creates. A point x* is trivial for a spec when
/// |f(x*)| <= 1e-12 and |g(x*)| <= 1e-12 after root refinement.
struct TransformReport {
    DiffusionSpec source;
    DiffusionSpec target;
    Expr correction;  // signed: target drift = source drift + correction

    std::vector<double> fixed_points_source;
    std::vector<double> fixed_points_target;
    std::vector<double> destroyed;  // trivial in source, not in target
    std::vector<double> created;    // trivial in target, not in source

    // Common roots of g where g' also vanishes: the audit is silent there
    // (they are excluded from destroyed/created and flagged instead).
    std::vector<double> degenerate_points;
    std::vector<std::string> warnings;
};

/// Roots of g within the closed domain (validation-grid scan refined by
/// bisection to 1e-12). These are the only candidates for trivial solutions.
std::vector<double> degenerate_candidates(const DiffusionSpec& s);

/// Populates destroyed/created lists for two specs sharing g and domain.
void absorbing_state_audit(const DiffusionSpec& source, const DiffusionSpec& target,
                           TransformReport& report);

/// Formal Ito -> Stratonovich transformation: target drift f - g'/2, same g.
/// Requires s.interpretation == Ito.
TransformReport ito_to_stratonovich(const DiffusionSpec& s);

/// Formal Stratonovich -> Ito transformation: target drift f + g'/2, same g.
/// Requires s.interpretation == Stratonovich.
TransformReport stratonovich_to_ito(const DiffusionSpec& s);

std::string transform_report_json(const TransformReport& report);

}  // namespace sde1d
