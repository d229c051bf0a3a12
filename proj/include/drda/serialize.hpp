#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "drda/dataset.hpp"
#include "drda/experiments.hpp"
#include "drda/model.hpp"
#include "drda/qp.hpp"
#include "drda/solver.hpp"

namespace drda {

// Shortest decimal encoding that parses back to the same double.
std::string format_double(double v);

// Model JSON {sigma, support_points, alpha}; round-trips bit-exactly.
nlohmann::json model_to_json(const RegressionModel& model);
RegressionModel model_from_json(const nlohmann::json& j);

nlohmann::json weights_to_json(const WeightVector& w);
nlohmann::json report_to_json(const FitReport& report);

// CSV with header "x1,...,xd[,y]"; label column detected by a trailing "y".
void write_dataset_csv(const std::filesystem::path& path, const Dataset& d);
Dataset read_dataset_csv(const std::filesystem::path& path);

// Aggregate table ("method,<x>,mean_loss,ci_half_width,trials"), per-trial
// companion ("method,<x>,trial,loss"), and one two-column series file per
// method for plotting.
void write_result_table(const std::filesystem::path& dir, const std::string& stem,
                        const ResultTable& table);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

} // namespace drda
