#include "vcad/report.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "vcad/errors.hpp"

namespace vcad {

namespace {

using nlohmann::json;

json rate(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

std::string percent(double v) {
    if (std::isnan(v)) {
        return "   n/a";
    }
    std::ostringstream s;
    s << std::fixed << std::setprecision(1) << std::setw(5) << 100.0 * v << '%';
    return s.str();
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (const auto it = j.find(key); it != j.end()) {
        try {
            out = it->get<T>();
        } catch (const json::exception& e) {
            throw ValidationError(std::string("scenario field '") + key + "': " + e.what());
        }
    }
}

}  // namespace

json events_to_json(std::span<const GroupEvent> events, double fps, DetectionMethod method) {
    json out = json::array();
    for (const auto& e : events) {
        out.push_back({{"start_frame", e.start_frame},
                       {"end_frame", e.end_frame},
                       {"start_seconds", static_cast<double>(e.start_frame) / fps},
                       {"end_seconds", static_cast<double>(e.end_frame) / fps},
                       {"participants", std::vector<TrackId>(e.participant_ids.begin(), e.participant_ids.end())},
                       {"points", e.point_count},
                       {"method", std::string(to_string(method))}});
    }
    return out;
}

std::vector<GroupEvent> events_from_json(const json& j) {
    std::vector<GroupEvent> out;
    for (const auto& e : j) {
        GroupEvent ev;
        ev.start_frame = e.at("start_frame").get<std::int64_t>();
        ev.end_frame = e.at("end_frame").get<std::int64_t>();
        for (const auto& id : e.at("participants")) {
            ev.participant_ids.insert(id.get<TrackId>());
        }
        ev.point_count = e.value("points", std::size_t{0});
        out.push_back(std::move(ev));
    }
    return out;
}

json report_to_json(const EvalReport& r) {
    return {{"tp", r.tp},
            {"fp", r.fp},
            {"tn", r.tn},
            {"fn", r.fn},
            {"recall", rate(r.recall)},
            {"precision", rate(r.precision)},
            {"tnr", rate(r.tnr)},
            {"fpr", rate(r.fpr)}};
}

json sweep_to_json(const SweepResult& result) {
    json folds = json::array();
    for (const auto& f : result.folds) {
        folds.push_back({{"test_videos", f.test_videos},
                         {"window", f.selected.window},
                         {"threshold", f.selected.threshold},
                         {"epsilon", f.selected.epsilon},
                         {"train", report_to_json(f.train)},
                         {"test", report_to_json(f.test)}});
    }
    return {{"method", std::string(to_string(result.method))},
            {"arima_order", {result.arima_order.p, result.arima_order.d, result.arima_order.q}},
            {"grid_size", result.grid_size},
            {"folds", folds},
            {"mean",
             {{"recall", rate(result.mean.recall)},
              {"precision", rate(result.mean.precision)},
              {"tnr", rate(result.mean.tnr)},
              {"fpr", rate(result.mean.fpr)}}}};
}

void print_report(std::ostream& out, const EvalReport& r) {
    out << "frames  TP=" << r.tp << "  FP=" << r.fp << "  TN=" << r.tn << "  FN=" << r.fn << '\n'
        << "Recall  Precision  TNR     FPR\n"
        << percent(r.recall) << "  " << percent(r.precision) << "     " << percent(r.tnr) << "  "
        << percent(r.fpr) << '\n';
}

void print_sweep(std::ostream& out, const SweepResult& result) {
    out << "method " << to_string(result.method) << ", " << result.grid_size << " grid points, "
        << result.folds.size() << " folds\n"
        << "fold  window  threshold  epsilon  Recall  Precision  TNR     FPR\n";
    for (std::size_t k = 0; k < result.folds.size(); ++k) {
        const auto& f = result.folds[k];
        out << std::setw(4) << k << "  " << std::setw(6) << f.selected.window << "  " << std::setw(9)
            << std::fixed << std::setprecision(2) << f.selected.threshold << "  " << std::setw(7)
            << f.selected.epsilon << "  " << percent(f.test.recall) << "  " << percent(f.test.precision)
            << "     " << percent(f.test.tnr) << "  " << percent(f.test.fpr) << '\n';
    }
    out << "mean                               " << percent(result.mean.recall) << "  "
        << percent(result.mean.precision) << "     " << percent(result.mean.tnr) << "  "
        << percent(result.mean.fpr) << '\n';
}

std::vector<SyntheticScenario> scenarios_from_json(const json& j) {
    if (!j.is_object()) {
        throw ValidationError("scenario document must be a JSON object");
    }
    if (j.contains("meetings")) {
        ScenarioSpace space;
        std::size_t meetings = 0;
        std::uint64_t seed = 0;
        read_opt(j, "meetings", meetings);
        read_opt(j, "seed", seed);
        read_opt(j, "participants_min", space.participants_min);
        read_opt(j, "participants_max", space.participants_max);
        read_opt(j, "duration_min", space.duration_min);
        read_opt(j, "duration_max", space.duration_max);
        read_opt(j, "events_min", space.events_min);
        read_opt(j, "events_max", space.events_max);
        read_opt(j, "affected_min", space.affected_min);
        read_opt(j, "affected_max", space.affected_max);
        read_opt(j, "intensity_min", space.intensity_min);
        read_opt(j, "intensity_max", space.intensity_max);
        read_opt(j, "event_seconds_min", space.event_seconds_min);
        read_opt(j, "event_seconds_max", space.event_seconds_max);
        read_opt(j, "noise_scale", space.noise_scale);
        read_opt(j, "fps", space.fps);
        read_opt(j, "dual_channel", space.dual_channel);
        if (space.participants_min == 0 || space.participants_min > space.participants_max ||
            space.duration_min <= 0 || space.duration_min > space.duration_max ||
            (space.events_max > 0 && space.events_min > space.events_max)) {
            throw ValidationError("scenario ranges must be non-empty and ordered (min <= max)");
        }
        std::vector<SyntheticScenario> out;
        for (std::size_t m = 0; m < meetings; ++m) {
            out.push_back(random_scenario(seed + m, space));
        }
        return out;
    }
    SyntheticScenario sc;
    read_opt(j, "participants", sc.participant_count);
    read_opt(j, "duration_frames", sc.duration_frames);
    read_opt(j, "noise_scale", sc.noise_scale);
    read_opt(j, "seed", sc.seed);
    read_opt(j, "fps", sc.fps);
    read_opt(j, "step_jitter", sc.step_jitter);
    read_opt(j, "embedding_scale", sc.embedding_scale);
    read_opt(j, "dual_channel", sc.dual_channel);
    if (const auto it = j.find("events"); it != j.end()) {
        for (const auto& e : *it) {
            SyntheticEvent ev;
            read_opt(e, "onset_frame", ev.onset_frame);
            read_opt(e, "duration_frames", ev.duration_frames);
            read_opt(e, "affected_fraction", ev.affected_fraction);
            read_opt(e, "intensity", ev.intensity);
            read_opt(e, "label", ev.label);
            sc.events.push_back(ev);
        }
    }
    sc.validate();
    return {sc};
}

}  // namespace vcad
