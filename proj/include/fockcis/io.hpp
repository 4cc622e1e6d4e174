// io.hpp — file formats: sequence/coefficient/reference CSVs and JSON
// reports with stable key order. All doubles are written in shortest
// round-trip form so outputs are byte-for-byte reproducible.

#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "fockcis/frame.hpp"
#include "fockcis/geometry.hpp"
#include "fockcis/product.hpp"
#include "fockcis/reference.hpp"
#include "fockcis/weight.hpp"

namespace fockcis::io {

using ordered_json = nlohmann::ordered_json;

// Shortest text that parses back to exactly v.
std::string format_double(double v);

// Sequence CSV: header "t,theta", one point per row, any order (the loader
// sorts, stably). Malformed rows are reported with their line number.
PointSequence read_sequence_csv(const std::string& path);
void write_sequence_csv(const std::string& path, const PointSequence& g);

// Reference CSV: header "n,y,log_sigma_norm" (log evaluation norm at
// sigma_n, theorem method).
void write_reference_csv(const std::string& path,
                         const ReferenceSequence& ref,
                         const std::vector<double>& log_sigma_norm);

// Monomial-norm table CSV: header "n,log_norm_quadrature,log_norm_asymptotic".
void write_norm_table_csv(const std::string& path, const NormTable& quad,
                          const NormTable& asym);

// Coefficient CSV: header "n,re,im"; missing indices are zero.
CoefficientVector read_coefficients_csv(const std::string& path, double p);

// Node-values CSV: header "n,re,im".
void write_values_csv(const std::string& path,
                      const std::vector<std::array<double, 2>>& values);

// Gram CSV: per row, re and im interleaved.
void write_gram_csv(const std::string& path, const GramMatrix& gm);

ordered_json classification_json(const ClassificationReport& rep);
ordered_json density_json(const DensityReport& rep);
ordered_json riesz_json(const RieszReport& rep);
ordered_json regularity_json(const RegularityReport& rep);

void write_json(const std::string& path, const ordered_json& j);

}  // namespace fockcis::io
