#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "krausopt/channel.hpp"
#include "krausopt/states.hpp"

namespace krausopt {

// Complex entries are stored as [re, im]; matrices as arrays of rows.
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

/// {"type": "kraus_channel", "input_dim", "output_dim", "kraus_rank", "operators"}
nlohmann::json channel_to_json(const KrausChannel& ch);
KrausChannel channel_from_json(const nlohmann::json& j, double cptp_tol = kInputTol);

/// {"type": "ensemble", "dim", "probabilities", "states"}. On input a
/// "vectors" array of pure-state amplitudes may replace "states".
nlohmann::json ensemble_to_json(const Ensemble& e);
Ensemble ensemble_from_json(const nlohmann::json& j);

/// Fixed 12-significant-digit rendering used in every CSV file.
std::string format_real(double v);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace krausopt
