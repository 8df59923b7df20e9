#pragma once

#include <optional>
#include <string>
#include <vector>

#include "carbonprice/accounting.hpp"

namespace carbonprice {

enum class ReportFormat { table, csv, records };

ReportFormat format_from_string(const std::string& name);

struct ReportContext {
    std::string scenario;
    /// Display group per firm; empty entries are shown as "Firms".
    std::vector<std::string> groups;
};

/// Fixed header of the csv format.
inline constexpr const char* kCsvHeader =
    "scenario,scheme,entity,wealth_eur,emissions_tons,carbon_price_eur_per_ton,demand_tons";

/// Renders one column (or one block of rows) per entry of `accounts`.
/// table: billions of euros and millions of tons, rounded half-to-even.
/// csv: unrounded, shortest round-trip representation.
/// records: JSON with per-entity GDP and emission shares.
std::string emit_report(const ReportContext& ctx, const std::vector<SchemeAccounts>& accounts,
                        ReportFormat format);

/// table or records; csv is rejected with DomainError.
std::string emit_comparison(const ReportContext& ctx, const std::vector<ComparisonReport>& reports,
                            ReportFormat format);

struct CsvRow {
    std::string scenario;
    std::string scheme;
    std::string entity;
    std::optional<double> wealth_eur;
    std::optional<double> emissions_tons;
    std::optional<double> carbon_price_eur_per_ton;
    std::optional<double> demand_tons;
};

/// Inverse of the csv format; throws ScenarioError on a malformed document.
std::vector<CsvRow> parse_csv_report(const std::string& text);

/// Round to `decimals` places, ties to even.
double round_half_even(double x, int decimals = 0);

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

}  // namespace carbonprice
