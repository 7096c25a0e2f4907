#pragma once

#include <string>
#include <vector>

#include "minkflow/flow.hpp"
#include "minkflow/geometry.hpp"
#include "minkflow/mesh.hpp"

namespace minkflow {

// Body exchange format: CSV with header `theta,h`, N rows, theta strictly
// increasing from 0 on the uniform grid.
SupportFn read_body_csv(const std::string& path);
void write_body_csv(const std::string& path, const SupportFn& s);

void write_timeseries_csv(const std::string& path,
                          const std::vector<TimeSeriesRow>& rows);

// Optional mesh dump: vertex list and triangle list.
void write_mesh_csv(const std::string& vertex_path, const std::string& tri_path,
                    const Mesh& mesh);

// Parsers for CLI value specs.
// f spec: "const:<c>" | "trig:k,a,b[;k,a,b...]" | "csv:<path>" (resampled)
std::vector<double> parse_f_spec(const std::string& spec, int N);
// init spec: "disk:R" | "ellipse:a,b" | "fourier:k,a,b[;...]" | "csv:<path>"
SupportFn parse_init_spec(const std::string& spec, int N);
std::vector<FourierTerm> parse_fourier_terms(const std::string& body);

}  // namespace minkflow
