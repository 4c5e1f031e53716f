#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "mcd/freqresp.hpp"
#include "mcd/statespace.hpp"

namespace mcd {

using Json = nlohmann::json;

Json matrix_to_json(const Matrix& m);
/// Accepts a row-major nested array; "[]" yields an empty matrix with the supplied shape hint.
Matrix matrix_from_json(const Json& j, const std::string& what, Index rows_hint = 0, Index cols_hint = 0);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& what);

Json to_json(const StateSpace& g);
StateSpace state_space_from_json(const Json& j);

/// Columns: freq_hz,out,in,re,im,mag_db,phase_deg
void write_csv(std::ostream& os, const FrequencyResponse& fr);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace mcd
