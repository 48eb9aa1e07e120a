#pragma once

#include <cstdint>
#include <string>

#include "core/converter_model.hpp"
#include "core/criteria.hpp"
#include "core/lure_gain.hpp"
#include "core/simulator.hpp"

namespace cmcert {

/// Scientific notation with 10 significant digits; "inf"/"-inf"/"nan" for
/// non-finite values. Locale independent.
std::string format_number(double value);

std::string surface_csv(const GainSurface& surface);
std::string trace_csv(const TransientTrace& trace);
std::string ensemble_csv(const GainEstimate& estimate, std::uint64_t seed);

/// `key = value` blocks.
std::string describe(const ConverterParams& params);
std::string describe(const Equilibrium& eq, const DerivedConstants& d,
                     const AssumptionReport& a);
std::string describe(const StabilityReport& report);
std::string describe(const SimVerdict& verdict, const TransientTrace& trace);

std::string stability_csv_header();
std::string stability_csv_row(const StabilityReport& report);

/// Throws IoError on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace cmcert
