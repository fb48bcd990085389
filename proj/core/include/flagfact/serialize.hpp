#pragma once

// JSON encodings.
//
//   instance  {"kind": "dense-standard", "dim": n}
//             {"kind": "dense-indefinite", "J": [1, -1, ...]}
//             {"kind": "loop", "matdim": k, "gridsize": m}
//             {"kind": "block", "blockcount": n, "inner": <instance>}
//             each optionally with "tolerances": {...}
//   element   dense:  row-major nested arrays of [re, im] pairs
//             loop:   {"matdim": k, "gridsize": m, "samples": [<dense>...]}
//             block:  {"blockcount": n, "blocks": [[<inner element>...]...]}
//   flag      {"instance": <instance>, "chain": [<element>...], "selfadjoint": bool}

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

#include "flagfact/algebra.hpp"
#include "flagfact/factorization.hpp"
#include "flagfact/flags.hpp"

namespace flagfact {

using Json = nlohmann::json;

Json tolerances_to_json(const ToleranceConfig& tol);
/// Overrides the fields present in `j` on top of `base`.
ToleranceConfig tolerances_from_json(const Json& j, ToleranceConfig base = {});

Json instance_to_json(const AlgebraInstance& instance);
InstancePtr instance_from_json(const Json& j);
/// "dense:N", "indefinite:1,-1,...", "loop:K,M", "block:N:<inner shorthand>".
InstancePtr parse_instance_shorthand(std::string_view text);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, int dim);

Json element_to_json(const Element& x);
Element element_from_json(const Json& j, const InstancePtr& instance);

Json flag_to_json(const Flag& flag);
/// Falls back to `instance` when the document carries no descriptor.
Flag flag_from_json(const Json& j, const InstancePtr& instance);
/// "standard:k1,k2,...", "full" or "trivial".
Flag parse_flag_shorthand(std::string_view text, const InstancePtr& instance);

Json complex_to_json(Complex z);
Json spectrum_to_json(const SpectrumApprox& sp);

/// {"factors": {...}, "diagnostics": {"residual", "corner_conditions", "spectra"}}
Json factors_to_json(const GaussFactors& f);
Json factors_to_json(const NestGramFactors& f);
Json factors_to_json(const UABFactors& f);

}  // namespace flagfact
