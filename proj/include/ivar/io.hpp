#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ivar/domains.hpp"
#include "ivar/gp.hpp"
#include "ivar/kernels.hpp"

namespace ivar {

// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

// RFC-4180 style CSV: fields containing separators or quotes are quoted.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& value);

// Named presets (interval, ball2d, ball5d, nonconvex, gaussianN) or
// "hypercube:d=2,lo=-1,hi=1", "ball:d=2,r=0.7", "gaussian:d=3".
Domain parse_domain(const std::string& spec);

// "se:l=0.2[,gamma=1]", "se-ard:l=0.2/0.3[,gamma=1]", "mehler:t=0.8" (one
// value is repeated over `dim` coordinates) or "mehler:t=0.5/0.6",
// "hermite:t=0.8,terms=20" (finite-rank truncation of the Mehler expansion).
Kernel parse_kernel(const std::string& spec, int dim);

nlohmann::json kernel_to_json(const Kernel& kernel);
nlohmann::json domain_to_json(const Domain& domain);

// Header x1..xd[,y],provenance; one row per design point.
void write_design_csv(const std::filesystem::path& path, const Design& design);

}  // namespace ivar
