#include "akbe/metrics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "akbe/errors.hpp"

namespace akbe {

AggregateMetrics aggregate_metrics(const std::vector<EvalPoint>& evals) {
    if (evals.empty())
        throw ConfigError("aggregate_metrics: empty evaluation list");
    double correct = 0.0;
    double tc_sum = 0.0;
    for (const EvalPoint& e : evals) {
        correct += e.correct ? 1.0 : 0.0;
        tc_sum += e.tc;
    }
    AggregateMetrics m;
    const double n = static_cast<double>(evals.size());
    m.em = correct / n;
    m.mean_tc = tc_sum / n;
    m.tp = tc_sum > 0.0 ? correct / tc_sum
                        : std::numeric_limits<double>::infinity();
    return m;
}

std::array<double, kNumCategories> category_distribution(
    const std::vector<DualPathOutcome>& outcomes) {
    if (outcomes.empty())
        throw ConfigError("category_distribution: empty outcome list");
    std::array<double, kNumCategories> fractions{};
    for (const DualPathOutcome& o : outcomes)
        fractions[static_cast<int>(o.category)] += 1.0;
    for (double& f : fractions) f /= static_cast<double>(outcomes.size());
    return fractions;
}

std::vector<int> nt_confidence_histogram(
    const std::vector<RolloutGroup>& groups) {
    std::size_t g_nt = 0;
    for (const RolloutGroup& g : groups)
        g_nt = std::max(g_nt, g.no_tool.size());
    std::vector<int> bins(g_nt, 0);
    for (const RolloutGroup& g : groups) {
        int correct = 0;
        for (const Trajectory& t : g.no_tool)
            if (t.reward == 1) ++correct;
        if (correct > 0) ++bins[correct - 1];
    }
    return bins;
}

const char* to_string(DegradationLabel label) {
    switch (label) {
        case DegradationLabel::Original: return "original";
        case DegradationLabel::Redundant: return "redundant";
        case DegradationLabel::Hallucinated: return "hallucinated";
        case DegradationLabel::OutOfScope: return "out_of_scope";
    }
    return "?";
}

DegradationSummary degradation_tracking(
    const std::map<std::string, EvalPoint>& early,
    const std::map<std::string, EvalPoint>& late) {
    DegradationSummary summary;
    for (const auto& [id, early_point] : early) {
        if (!early_point.correct) {
            summary.labels[id] = DegradationLabel::OutOfScope;
            ++summary.out_of_scope;
            continue;
        }
        auto it = late.find(id);
        if (it == late.end())
            throw DataError("degradation_tracking: missing late entry for " + id);
        const EvalPoint& late_point = it->second;
        DegradationLabel label;
        if (!late_point.correct)
            label = DegradationLabel::Hallucinated;
        else if (late_point.tc > early_point.tc)
            label = DegradationLabel::Redundant;
        else
            label = DegradationLabel::Original;
        summary.labels[id] = label;
        switch (label) {
            case DegradationLabel::Original: ++summary.original; break;
            case DegradationLabel::Redundant: ++summary.redundant; break;
            case DegradationLabel::Hallucinated: ++summary.hallucinated; break;
            case DegradationLabel::OutOfScope: break;
        }
    }
    return summary;
}

double cost_accounting(const std::vector<Trajectory>& trajs,
                       double cost_per_tool, double cost_per_step) {
    if (cost_per_tool < 0.0 || cost_per_step < 0.0)
        throw ConfigError("cost_accounting: costs must be >= 0");
    double total = 0.0;
    for (const Trajectory& t : trajs)
        total += static_cast<double>(t.steps.size()) * cost_per_step +
                 static_cast<double>(t.tc) * cost_per_tool;
    return total;
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

namespace {

double parse_double(const std::string& tok) {
    if (tok == "inf") return std::numeric_limits<double>::infinity();
    if (tok == "-inf") return -std::numeric_limits<double>::infinity();
    return std::strtod(tok.c_str(), nullptr);
}

}  // namespace

std::string metrics_csv_header() {
    return "step,em,mean_tc,tp,frac_tool_dependent,frac_efficiency,"
           "frac_hallucination,frac_both_wrong,mean_reward,signal_count,"
           "cost_units,loss_grpo,loss_akbe,loss_total,phase";
}

std::string metrics_csv_row(const MetricsRecord& rec) {
    std::ostringstream row;
    row << rec.step << ',' << format_double(rec.em) << ','
        << format_double(rec.mean_tc) << ',' << format_double(rec.tp);
    for (double f : rec.category_fractions) row << ',' << format_double(f);
    row << ',' << format_double(rec.mean_reward) << ',' << rec.signal_count
        << ',' << format_double(rec.cost_units) << ','
        << format_double(rec.loss_grpo) << ',' << format_double(rec.loss_akbe)
        << ',' << format_double(rec.loss_total) << ',' << rec.phase;
    return row.str();
}

std::vector<MetricsRecord> read_metrics_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::vector<MetricsRecord> records;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line != metrics_csv_header())
                throw DataError("unexpected metrics CSV header in " + path);
            continue;
        }
        std::vector<std::string> tok;
        std::stringstream ss(line);
        std::string piece;
        while (std::getline(ss, piece, ',')) tok.push_back(piece);
        if (tok.size() != 15)
            throw DataError("bad metrics CSV row in " + path + ": " + line);
        MetricsRecord rec;
        rec.step = std::stoi(tok[0]);
        rec.em = parse_double(tok[1]);
        rec.mean_tc = parse_double(tok[2]);
        rec.tp = parse_double(tok[3]);
        for (int c = 0; c < kNumCategories; ++c)
            rec.category_fractions[c] = parse_double(tok[4 + c]);
        rec.mean_reward = parse_double(tok[8]);
        rec.signal_count = std::stoi(tok[9]);
        rec.cost_units = parse_double(tok[10]);
        rec.loss_grpo = parse_double(tok[11]);
        rec.loss_akbe = parse_double(tok[12]);
        rec.loss_total = parse_double(tok[13]);
        rec.phase = tok[14];
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace akbe
