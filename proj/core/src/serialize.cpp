#include "flagfact/serialize.hpp"

#include <charconv>
#include <string>
#include <vector>

namespace flagfact {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos
                                                                   : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

int parse_int(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError("expected an integer, got '" + std::string(text) + "'");
  return value;
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  if (text.empty()) return out;
  for (auto part : split(text, ',')) out.push_back(parse_int(part));
  return out;
}

template <class T>
T get_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad field '") + key + "': " + e.what());
  }
}

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError("complex entries are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

Json tolerances_to_json(const ToleranceConfig& tol) {
  return Json{{"rel_residual", tol.rel_residual},
              {"inv_threshold", tol.inv_threshold},
              {"spec_margin", tol.spec_margin},
              {"loop_smoothness", tol.loop_smoothness}};
}

ToleranceConfig tolerances_from_json(const Json& j, ToleranceConfig base) {
  if (!j.is_object()) throw ParseError("tolerances must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw ParseError("tolerance '" + key + "' must be a number");
    const double v = value.get<double>();
    if (key == "rel_residual") base.rel_residual = v;
    else if (key == "inv_threshold") base.inv_threshold = v;
    else if (key == "spec_margin") base.spec_margin = v;
    else if (key == "loop_smoothness") base.loop_smoothness = v;
    else throw ParseError("unknown tolerance '" + key + "'");
  }
  try {
    base.validate();
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
  return base;
}

Json instance_to_json(const AlgebraInstance& instance) {
  Json j;
  j["kind"] = to_string(instance.kind());
  switch (instance.kind()) {
    case InstanceKind::DenseStandard:
      j["dim"] = instance.dim();
      break;
    case InstanceKind::DenseIndefinite: {
      std::vector<int> sig;
      for (Eigen::Index i = 0; i < instance.signature().size(); ++i)
        sig.push_back(static_cast<int>(instance.signature()(i)));
      j["J"] = sig;
      break;
    }
    case InstanceKind::Loop:
      j["matdim"] = instance.matdim();
      j["gridsize"] = instance.gridsize();
      break;
    case InstanceKind::Block:
      j["blockcount"] = instance.blockcount();
      j["inner"] = instance_to_json(*instance.inner());
      break;
  }
  if (!(instance.tolerances() == ToleranceConfig{}))
    j["tolerances"] = tolerances_to_json(instance.tolerances());
  return j;
}

InstancePtr instance_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("instance descriptor must be an object");
  const auto kind = get_field<std::string>(j, "kind");
  try {
    if (kind == "block") {
      auto inner = instance_from_json(j.at("inner"));
      auto tol = inner->tolerances();
      if (j.contains("tolerances")) tol = tolerances_from_json(j["tolerances"], tol);
      return AlgebraInstance::block(get_field<int>(j, "blockcount"), inner, tol);
    }
    ToleranceConfig tol;
    if (j.contains("tolerances")) tol = tolerances_from_json(j["tolerances"]);
    if (kind == "dense-standard") return AlgebraInstance::dense(get_field<int>(j, "dim"), tol);
    if (kind == "dense-indefinite")
      return AlgebraInstance::indefinite(get_field<std::vector<int>>(j, "J"), tol);
    if (kind == "loop")
      return AlgebraInstance::loop(get_field<int>(j, "matdim"), get_field<int>(j, "gridsize"),
                                   tol);
  } catch (const ParseError&) {
    throw;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad instance descriptor: ") + e.what());
  } catch (const Error& e) {
    throw ParseError(std::string("bad instance descriptor: ") + e.what());
  }
  throw ParseError("unknown instance kind '" + kind + "'");
}

InstancePtr parse_instance_shorthand(std::string_view text) {
  const auto colon = text.find(':');
  const auto kind = text.substr(0, colon);
  const auto rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  try {
    if (kind == "dense") return AlgebraInstance::dense(parse_int(rest));
    if (kind == "indefinite") return AlgebraInstance::indefinite(parse_int_list(rest));
    if (kind == "loop") {
      const auto parts = parse_int_list(rest);
      if (parts.size() != 2) throw ParseError("loop shorthand is loop:K,M");
      return AlgebraInstance::loop(parts[0], parts[1]);
    }
    if (kind == "block") {
      const auto next = rest.find(':');
      if (next == std::string_view::npos) throw ParseError("block shorthand is block:N:<inner>");
      return AlgebraInstance::block(parse_int(rest.substr(0, next)),
                                    parse_instance_shorthand(rest.substr(next + 1)));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("bad instance shorthand: ") + e.what());
  }
  throw ParseError("unknown instance shorthand '" + std::string(text) + "'");
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, int dim) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(dim))
    throw ParseError("expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(dim))
      throw ParseError("matrix row " + std::to_string(r) + " has the wrong length");
    for (int c = 0; c < dim; ++c) m(r, c) = complex_from_json(row[c]);
  }
  return m;
}

Json element_to_json(const Element& x) {
  const auto& inst = x.instance();
  switch (inst.kind()) {
    case InstanceKind::DenseStandard:
    case InstanceKind::DenseIndefinite:
      return matrix_to_json(x.matrix());
    case InstanceKind::Loop: {
      Json samples = Json::array();
      for (const auto& s : x.samples()) samples.push_back(matrix_to_json(s));
      return Json{{"matdim", inst.matdim()}, {"gridsize", inst.gridsize()}, {"samples", samples}};
    }
    case InstanceKind::Block: {
      Json blocks = Json::array();
      for (int i = 0; i < inst.blockcount(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < inst.blockcount(); ++j) row.push_back(element_to_json(block_at(x, i, j)));
        blocks.push_back(std::move(row));
      }
      return Json{{"blockcount", inst.blockcount()}, {"blocks", blocks}};
    }
  }
  throw Error("unreachable instance kind");
}

Element element_from_json(const Json& j, const InstancePtr& instance) {
  try {
    switch (instance->kind()) {
      case InstanceKind::DenseStandard:
      case InstanceKind::DenseIndefinite:
        return Element(instance, {matrix_from_json(j, instance->dim())});
      case InstanceKind::Loop: {
        if (get_field<int>(j, "matdim") != instance->matdim() ||
            get_field<int>(j, "gridsize") != instance->gridsize())
          throw ParseError("loop element does not match the instance");
        const auto& samples = j.at("samples");
        if (!samples.is_array() || samples.size() != static_cast<std::size_t>(instance->gridsize()))
          throw ParseError("loop element needs one sample per grid point");
        std::vector<Matrix> out;
        for (const auto& s : samples) out.push_back(matrix_from_json(s, instance->matdim()));
        return Element(instance, std::move(out));
      }
      case InstanceKind::Block: {
        const int n = instance->blockcount();
        if (get_field<int>(j, "blockcount") != n)
          throw ParseError("block element does not match the instance");
        const auto& rows = j.at("blocks");
        if (!rows.is_array() || rows.size() != static_cast<std::size_t>(n))
          throw ParseError("block element needs blockcount rows");
        std::vector<std::vector<Element>> blocks;
        for (const auto& row : rows) {
          if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
            throw ParseError("block row has the wrong length");
          std::vector<Element> r;
          for (const auto& b : row) r.push_back(element_from_json(b, instance->inner()));
          blocks.push_back(std::move(r));
        }
        return assemble_blocks(instance, blocks);
      }
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad element: ") + e.what());
  } catch (const Error& e) {
    throw ParseError(std::string("bad element: ") + e.what());
  }
  throw ParseError("unreachable instance kind");
}

Json flag_to_json(const Flag& flag) {
  Json chain = Json::array();
  for (const auto& p : flag.chain()) chain.push_back(element_to_json(p.element()));
  return Json{{"instance", instance_to_json(flag.instance())},
              {"chain", chain},
              {"selfadjoint", flag.selfadjoint()}};
}

Flag flag_from_json(const Json& j, const InstancePtr& instance) {
  if (!j.is_object()) throw ParseError("flag must be an object");
  auto inst = j.contains("instance") ? instance_from_json(j["instance"]) : instance;
  if (!inst) throw ParseError("flag without an instance");
  if (!j.contains("chain") || !j["chain"].is_array()) throw ParseError("flag needs a chain array");
  std::vector<Idempotent> chain;
  try {
    for (const auto& e : j["chain"]) chain.emplace_back(element_from_json(e, inst));
    Flag flag(inst, std::move(chain));
    if (j.contains("selfadjoint") && j["selfadjoint"].get<bool>() && !flag.selfadjoint())
      throw ParseError("flag is declared self-adjoint but its members are not");
    return flag;
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("bad flag: ") + e.what());
  }
}

Flag parse_flag_shorthand(std::string_view text, const InstancePtr& instance) {
  try {
    if (text == "trivial") return Flag::trivial(instance);
    if (text == "full") return full_flag(instance);
    constexpr std::string_view prefix = "standard:";
    if (text.starts_with(prefix))
      return standard_flag(instance, parse_int_list(text.substr(prefix.size())));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("bad flag shorthand: ") + e.what());
  }
  throw ParseError("unknown flag shorthand '" + std::string(text) + "'");
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json spectrum_to_json(const SpectrumApprox& sp) {
  Json pts = Json::array();
  for (const auto& z : sp.points) pts.push_back(complex_to_json(z));
  return Json{{"method", sp.method == SpectrumMethod::Eigenvalues ? "eigenvalues" : "pointwise-union"},
              {"points", pts}};
}

Json factors_to_json(const GaussFactors& f) {
  return Json{{"factors", {{"x", element_to_json(f.x)},
                           {"d", element_to_json(f.d)},
                           {"y", element_to_json(f.y)}}},
              {"diagnostics", {{"residual", f.residual},
                               {"corner_conditions", f.corner_conditions},
                               {"spectra", {{"d", spectrum_to_json(spectrum(f.d))}}}}}};
}

Json factors_to_json(const NestGramFactors& f) {
  return Json{{"factors", {{"d", element_to_json(f.d)}, {"b", element_to_json(f.b)}}},
              {"diagnostics", {{"residual", f.residual},
                               {"corner_conditions", f.corner_conditions},
                               {"spectra", {{"d", spectrum_to_json(f.d_spectrum)}}},
                               {"warnings", f.warnings}}}};
}

Json factors_to_json(const UABFactors& f) {
  return Json{{"factors", {{"u", element_to_json(f.u)},
                           {"a", element_to_json(f.a)},
                           {"b", element_to_json(f.b)}}},
              {"diagnostics", {{"residual", f.residual},
                               {"unitarity_residual", f.unitarity_residual},
                               {"corner_conditions", f.corner_conditions},
                               {"spectra", {{"a", spectrum_to_json(spectrum(f.a))}}},
                               {"warnings", f.warnings}}}};
}

}  // namespace flagfact
