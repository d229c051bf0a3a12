#include "drda/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

namespace drda {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

nlohmann::json model_to_json(const RegressionModel& model) {
    model.check();
    nlohmann::json j;
    j["sigma"] = model.bandwidth;
    auto pts = nlohmann::json::array();
    for (Index i = 0; i < model.support_points.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Index d = 0; d < model.support_points.cols(); ++d)
            row.push_back(model.support_points(i, d));
        pts.push_back(std::move(row));
    }
    j["support_points"] = std::move(pts);
    auto alpha = nlohmann::json::array();
    for (Index i = 0; i < model.alpha.size(); ++i) alpha.push_back(model.alpha[i]);
    j["alpha"] = std::move(alpha);
    return j;
}

RegressionModel model_from_json(const nlohmann::json& j) {
    RegressionModel model;
    model.bandwidth = j.at("sigma").get<double>();
    const auto& pts = j.at("support_points");
    const auto& alpha = j.at("alpha");
    if (!pts.is_array() || !alpha.is_array() || pts.size() != alpha.size())
        throw InvalidInput("model json: support_points/alpha size mismatch");
    const Index n = static_cast<Index>(pts.size());
    const Index d = n > 0 ? static_cast<Index>(pts.at(0).size()) : 1;
    model.support_points.resize(n, d);
    model.alpha.resize(n);
    for (Index i = 0; i < n; ++i) {
        const auto& row = pts.at(i);
        if (static_cast<Index>(row.size()) != d)
            throw InvalidInput("model json: ragged support points");
        for (Index k = 0; k < d; ++k) model.support_points(i, k) = row.at(k).get<double>();
        model.alpha[i] = alpha.at(i).get<double>();
    }
    model.check();
    return model;
}

nlohmann::json weights_to_json(const WeightVector& w) {
    nlohmann::json j;
    auto vals = nlohmann::json::array();
    for (Index i = 0; i < w.values.size(); ++i) vals.push_back(w.values[i]);
    j["values"] = std::move(vals);
    j["box_bound"] = w.box_bound;
    j["sum_slack"] = w.sum_slack;
    j["converged"] = w.converged;
    j["iterations"] = w.iterations;
    return j;
}

nlohmann::json report_to_json(const FitReport& report) {
    nlohmann::json j;
    j["objective_trace"] = report.objective_trace;
    j["converged"] = report.converged;
    j["outer_iterations"] = report.outer_iterations;
    j["final_objective"] = report.final_objective;
    j["final_mmd_sq"] = report.final_mmd_sq;
    j["final_weighted_risk"] = report.final_weighted_risk;
    j["used_sequential_start"] = report.used_sequential_start;
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::system_error(errno, std::generic_category(),
                                      "cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::system_error(errno, std::generic_category(),
                                      "write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::system_error(errno, std::generic_category(),
                                     "cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& d) {
    std::ostringstream out;
    const Index dim = d.size() > 0 ? d.dim() : 1;
    for (Index k = 0; k < dim; ++k) {
        if (k > 0) out << ',';
        if (dim == 1) out << 'x';
        else out << 'x' << (k + 1);
    }
    if (d.has_labels()) out << ",y";
    out << '\n';
    for (Index i = 0; i < d.size(); ++i) {
        for (Index k = 0; k < dim; ++k) {
            if (k > 0) out << ',';
            out << format_double(d.features(i, k));
        }
        if (d.has_labels()) out << ',' << format_double((*d.labels)[i]);
        out << '\n';
    }
    write_text_file(path, out.str());
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("csv: empty file " + path.string());

    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) header.push_back(cell);
    }
    if (header.empty()) throw InvalidInput("csv: missing header in " + path.string());
    const bool labeled = header.back() == "y";
    const Index dim = static_cast<Index>(header.size()) - (labeled ? 1 : 0);
    if (dim < 1) throw InvalidInput("csv: no feature columns in " + path.string());

    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> vals;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            double v = 0.0;
            const char* b = cell.data();
            const auto res = std::from_chars(b, b + cell.size(), v);
            if (res.ec != std::errc() || res.ptr != b + cell.size())
                throw InvalidInput("csv: bad number at " + path.string() + ":" +
                                   std::to_string(line_no));
            vals.push_back(v);
        }
        if (static_cast<Index>(vals.size()) != dim + (labeled ? 1 : 0))
            throw InvalidInput("csv: wrong column count at " + path.string() + ":" +
                               std::to_string(line_no));
        rows.push_back(std::move(vals));
    }

    Eigen::MatrixXd x(static_cast<Index>(rows.size()), dim);
    Eigen::VectorXd y(labeled ? static_cast<Index>(rows.size()) : 0);
    for (Index i = 0; i < x.rows(); ++i) {
        for (Index k = 0; k < dim; ++k) x(i, k) = rows[i][k];
        if (labeled) y[i] = rows[i][dim];
    }
    return labeled ? Dataset::labeled(std::move(x), std::move(y))
                   : Dataset::unlabeled(std::move(x));
}

namespace {

std::string sanitize(const std::string& name) {
    std::string out = name;
    for (char& ch : out)
        if (ch == '/' || ch == ' ') ch = '_';
    return out;
}

} // namespace

void write_result_table(const std::filesystem::path& dir, const std::string& stem,
                        const ResultTable& table) {
    std::ostringstream agg;
    agg << "method," << table.x_name << ",mean_loss,ci_half_width,trials\n";
    for (const auto& row : table.rows) {
        agg << row.method << ',' << format_double(row.x) << ','
            << format_double(row.mean_loss) << ',' << format_double(row.ci_half_width)
            << ',' << row.trials << '\n';
    }
    write_text_file(dir / (stem + ".csv"), agg.str());

    std::ostringstream per;
    per << "method," << table.x_name << ",trial,loss\n";
    for (const auto& t : table.per_trial) {
        per << t.method << ',' << format_double(t.x) << ',' << t.trial << ','
            << format_double(t.loss) << '\n';
    }
    write_text_file(dir / (stem + "_per_trial.csv"), per.str());

    // one (x, mean_loss) series per method
    std::vector<std::string> seen;
    for (const auto& row : table.rows) {
        if (std::find(seen.begin(), seen.end(), row.method) != seen.end()) continue;
        seen.push_back(row.method);
        std::ostringstream series;
        for (const auto& r : table.rows)
            if (r.method == row.method)
                series << format_double(r.x) << ' ' << format_double(r.mean_loss) << '\n';
        write_text_file(dir / (stem + "_" + sanitize(row.method) + ".dat"), series.str());
    }

    if (!table.failures.empty()) {
        std::ostringstream f;
        for (const auto& msg : table.failures) f << msg << '\n';
        write_text_file(dir / (stem + "_failures.txt"), f.str());
    }
}

} // namespace drda
