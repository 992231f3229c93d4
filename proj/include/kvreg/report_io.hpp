#pragma once

#include "kvreg/verify.hpp"

#include <json.hpp>

#include <span>
#include <string>
#include <string_view>

namespace kvreg::io {

/// Version of the report layout in schemas/kvreg-report.schema.json.
inline constexpr int kSchemaVersion = 1;

nlohmann::json to_json(const KummerParams& p);
nlohmann::json to_json(const IndependenceReport& r);
nlohmann::json to_json(const RegressionReport& r);
nlohmann::json to_json(const ResidualReport& r);
nlohmann::json to_json(const ParameterMapReport& r);
nlohmann::json to_json(const FitReport& r);

/// Floats with 17 significant digits.
std::string format_double(double v);

/// Header: bin,count,v_lo,v_hi,v_center, then mean_<t>,se_<t> for each
/// target t in report order.
std::string regression_csv(const RegressionReport& r);

/// Header: equation,point,lhs,rhs,rel_residual,tolerance
std::string residual_csv(const ResidualReport& r);

/// One column per name; all columns must have equal length.
std::string columns_csv(std::span<const std::string_view> names,
                        std::span<const std::span<const double>> columns);

}  // namespace kvreg::io
