#include "qtheta/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "qtheta/error.hpp"

namespace qtheta {

namespace {

std::string format_double(double x) {
  if (std::isnan(x)) return "null";
  if (std::isinf(x)) return x > 0 ? "1e999" : "-1e999";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write(std::ostringstream& os, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? "\n" + std::string(std::size_t(indent) * (depth + 1), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(std::size_t(indent) * depth, ' ') : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map keeps keys sorted
        if (!first) os << ',';
        first = false;
        os << pad << Json(it.key()).dump() << sep;
        write(os, it.value(), indent, depth + 1);
      }
      os << close << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ',';
        os << pad;
        write(os, j[i], indent, depth + 1);
      }
      os << close << ']';
      return;
    }
    case Json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DomainError(std::string("missing JSON field '") + key + "'");
  return j.at(key);
}

// Plain integer when it fits, decimal string otherwise.
Json big_json(const BigInt& x) {
  if (x >= std::numeric_limits<std::int64_t>::min() && x <= std::numeric_limits<std::int64_t>::max())
    return static_cast<std::int64_t>(x);
  return x.str();
}

BigInt big_from_json(const Json& v) {
  if (v.is_string()) return BigInt(v.get<std::string>());
  if (!v.is_number_integer()) throw DomainError("expected an integer");
  return BigInt(v.get<std::int64_t>());
}

}  // namespace

std::string dump_stable(const Json& j, int indent) {
  std::ostringstream os;
  write(os, j, indent, 0);
  return os.str();
}

Json to_json(const QuadraticNumber& x) {
  return {{"p", big_json(x.p())}, {"q", big_json(x.q())}, {"r", big_json(x.r())}, {"D", x.D()}};
}

QuadraticIrrational quadratic_from_json(const Json& j) {
  return QuadraticIrrational(QuadraticNumber(big_from_json(field(j, "p")), big_from_json(field(j, "q")),
                                             big_from_json(field(j, "r")), field(j, "D").get<std::int64_t>()));
}

Json to_json(const BigInt& x) { return big_json(x); }

Json to_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

cplx complex_from_json(const Json& j) { return {field(j, "re").get<double>(), field(j, "im").get<double>()}; }

Json to_json(const IntMatrix2& g) { return Json::array({big_json(g.a), big_json(g.b), big_json(g.c), big_json(g.d)}); }

IntMatrix2 matrix_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw DomainError("matrix must be [a, b, c, d]");
  return {big_from_json(j[0]), big_from_json(j[1]), big_from_json(j[2]), big_from_json(j[3])};
}

Json to_json(const TorusElement& x) {
  Json coeffs = Json::array();
  for (const auto& t : x.terms())
    coeffs.push_back({{"m1", t.m.m1}, {"m2", t.m.m2}, {"re", t.a.real()}, {"im", t.a.imag()}});
  return {{"theta", to_json(x.theta().value())}, {"tol", x.trunc_tol()}, {"coeffs", coeffs}};
}

TorusElement torus_from_json(const Json& j) {
  std::vector<Term> terms;
  for (const auto& c : field(j, "coeffs"))
    terms.push_back({{field(c, "m1").get<std::int64_t>(), field(c, "m2").get<std::int64_t>()},
                     {field(c, "re").get<double>(), field(c, "im").get<double>()}});
  return TorusElement::from_terms(quadratic_from_json(field(j, "theta")), field(j, "tol").get<double>(),
                                  std::move(terms));
}

Json to_json(const HolomorphicVector& v) {
  Json f = Json::array();
  for (cplx z : v.f) f.push_back(to_json(z));
  return {{"g", to_json(v.geom->g)},
          {"theta", to_json(v.geom->theta.value())},
          {"tau", to_json(v.geom->tau)},
          {"n", v.geom->n},
          {"f", f}};
}

HolomorphicVector holomorphic_from_json(const Json& j) {
  auto G = make_geometry(matrix_from_json(field(j, "g")), quadratic_from_json(field(j, "theta")),
                         complex_from_json(field(j, "tau")), field(j, "n").get<unsigned>());
  std::vector<cplx> f;
  for (const auto& z : field(j, "f")) f.push_back(complex_from_json(z));
  return HolomorphicVector(G, std::move(f));
}

Json to_json(const ResidualReport& r) {
  return {{"lhs_norm", r.lhs_norm}, {"rhs_norm", r.rhs_norm}, {"max_abs_diff", r.max_abs_diff}, {"pass", r.pass}};
}

Json to_json(const RankReport& r) {
  Json j = {{"check", r.check},       {"grade", r.grade}, {"rank", r.rank},
            {"expected", r.expected}, {"residual_max", r.residual_max}, {"pass", r.pass}};
  if (r.untestable) j["untestable"] = true;
  return j;
}

}  // namespace qtheta
