#include "klstoch/basis_io.hpp"

#include <fstream>

#include "klstoch/errors.hpp"

namespace klstoch {

nlohmann::json basis_to_json(const KLBasis& basis) {
  const auto& rule = basis.rule();
  const RowMatrix& phi = basis.eigenfunctions();
  nlohmann::json doc;
  doc["id"] = basis.id();
  doc["interval"] = {basis.interval().a(), basis.interval().b()};
  doc["rule"] = {{"kind", to_string(rule.kind())}, {"nodes", rule.nodes()}, {"weights", rule.weights()}};
  doc["eigenvalues"] = basis.eigenvalues();
  doc["eigenfunctions"] = {
      {"rows", phi.rows()},
      {"cols", phi.cols()},
      {"data", std::vector<double>(phi.data(), phi.data() + phi.size())},
  };
  if (basis.analytic_form()) {
    doc["analytic_form"] = to_string(*basis.analytic_form());
  } else {
    doc["analytic_form"] = nullptr;
  }
  return doc;
}

KLBasis basis_from_json(const nlohmann::json& doc) {
  try {
    const auto interval_pair = doc.at("interval").get<std::vector<double>>();
    require(interval_pair.size() == 2, ErrorCategory::Io, "basis interval must have two endpoints");
    const Interval interval(interval_pair[0], interval_pair[1]);
    const auto& r = doc.at("rule");
    QuadratureRule rule(quadrature_kind_from_string(r.at("kind").get<std::string>()), interval,
                        r.at("nodes").get<std::vector<double>>(), r.at("weights").get<std::vector<double>>());
    auto eigenvalues = doc.at("eigenvalues").get<std::vector<double>>();
    const auto& e = doc.at("eigenfunctions");
    const auto rows = e.at("rows").get<Eigen::Index>();
    const auto cols = e.at("cols").get<Eigen::Index>();
    const auto data = e.at("data").get<std::vector<double>>();
    require(static_cast<Eigen::Index>(data.size()) == rows * cols, ErrorCategory::Io,
            "eigenfunction data size does not match its shape");
    RowMatrix phi = Eigen::Map<const RowMatrix>(data.data(), rows, cols);
    std::optional<BrownianVariant> analytic;
    if (doc.contains("analytic_form") && !doc.at("analytic_form").is_null()) {
      analytic = brownian_variant_from_string(doc.at("analytic_form").get<std::string>());
    }
    return KLBasis(std::move(rule), std::move(eigenvalues), std::move(phi), analytic,
                   doc.value("id", std::string{}));
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCategory::Io, std::string("malformed basis document: ") + ex.what());
  }
}

void save_basis(const KLBasis& basis, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCategory::Io, "cannot write " + path.string());
  out << basis_to_json(basis).dump(1) << '\n';
}

KLBasis load_basis(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::Io, "cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCategory::Io, std::string("cannot parse ") + path.string() + ": " + ex.what());
  }
  return basis_from_json(doc);
}

}  // namespace klstoch
