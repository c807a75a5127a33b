#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lowreg/expression.hpp"
#include "lowreg/types.hpp"

namespace lowreg {

/// Parametrized path [0,1] -> R^n with an a.e. derivative. Immutable; eval
/// and derivative are pure. derivative() returns nullopt ("undefined here")
/// at kinks, piece junctions and on the declared null set of non-AC curves.
class Curve {
 public:
  struct Impl {
    virtual ~Impl() = default;
    virtual Vec eval(double t) const = 0;
    virtual std::optional<Vec> derivative(double t) const = 0;
    virtual int dim() const = 0;
    virtual std::string kind() const = 0;
  };

  Curve() = default;
  Curve(std::shared_ptr<const Impl> impl, std::vector<double> knots);

  Vec eval(double t) const;
  std::optional<Vec> derivative(double t) const;
  int dim() const { return impl_->dim(); }
  std::string kind() const { return impl_->kind(); }
  const std::vector<double>& knots() const { return knots_; }
  bool valid() const { return static_cast<bool>(impl_); }

 private:
  std::shared_ptr<const Impl> impl_;
  std::vector<double> knots_;  // sorted, includes 0 and 1
};

/// Cantor function via ternary digit scan truncated at `depth`; exact once a
/// digit 1 appears. Monotone nondecreasing in t.
double cantor_value(double t, int depth);

Curve make_expr_curve(std::vector<Expr> components,
                      std::optional<std::vector<Expr>> derivatives = std::nullopt,
                      std::vector<double> extra_knots = {});
Curve make_segment(const Vec& a, const Vec& b);
Curve make_polyline(const std::vector<Vec>& vertices);
Curve make_cantor_graph(int scan_depth = 60, int knot_level = 6);

Curve restrict(const Curve& c, double a, double b);
Curve concat(const Curve& c1, const Curve& c2);
/// phi must map [0,1] onto [0,1] weakly monotonically (checked by sampling).
Curve reparametrize(const Curve& c, const Expr& phi);

Curve curve_from_json(const nlohmann::json& spec);
Curve load_curve_file(const std::string& path);
/// Dense polyline export (the serialization for constructed curves).
nlohmann::json curve_to_polyline_json(const Curve& c, int vertices = 1025);

/// Fraction of midpoint samples where the derivative is defined (the AC
/// screen's observable).
double ac_defined_fraction(const Curve& c, int nodes = 2000);

}  // namespace lowreg
