#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lpvdd/synthesis/synthesis.hpp"

namespace lpvdd::synthesis {

// Matrices are row-major nested arrays; a weight may also be given as a list
// of diagonal entries or a bare number (1x1).
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
Eigen::MatrixXd weight_from_json(const nlohmann::json& j);

nlohmann::json weights_to_json(const Weights& w);
// Missing entries fall back to `defaults`.
Weights weights_from_json(const nlohmann::json& j, const Weights& defaults);

// The dictionary travels inside the result so it can be re-verified on its own.
nlohmann::json result_to_json(const SynthesisResult& r);
// Fails with Consistency if the embedded dictionary does not match its hash.
SynthesisResult result_from_json(const nlohmann::json& j);

void write_result(const std::filesystem::path& path, const SynthesisResult& r);
SynthesisResult read_result(const std::filesystem::path& path);

}  // namespace lpvdd::synthesis
