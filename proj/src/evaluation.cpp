#include "vcad/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <thread>
#include <tuple>

#include "vcad/errors.hpp"

namespace vcad {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ratio(std::int64_t num, std::int64_t den) {
    return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : kNaN;
}

std::vector<bool> binarize(std::int64_t total, auto&& windows) {
    std::vector<bool> mask(static_cast<std::size_t>(std::max<std::int64_t>(total, 0)), false);
    for (const auto& [start, end] : windows) {
        const auto lo = std::max<std::int64_t>(start, 0);
        const auto hi = std::min<std::int64_t>(end, total - 1);
        for (auto f = lo; f <= hi; ++f) {
            mask[static_cast<std::size_t>(f)] = true;
        }
    }
    return mask;
}

std::vector<std::pair<std::int64_t, std::int64_t>> spans(std::span<const GroupEvent> events) {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    for (const auto& e : events) {
        out.emplace_back(e.start_frame, e.end_frame);
    }
    return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> spans(std::span<const GroundTruthWindow> truth) {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    for (const auto& t : truth) {
        out.emplace_back(t.start_frame, t.end_frame);
    }
    return out;
}

double objective_value(const EvalReport& r, Objective o) {
    double v = kNaN;
    switch (o) {
        case Objective::Precision:
            v = r.precision;
            break;
        case Objective::Recall:
            v = r.recall;
            break;
        case Objective::F1:
            v = r.f1();
            break;
    }
    return std::isnan(v) ? -1.0 : v;
}

// Per-track per-sample scores for one method window; thresholds are applied later.
struct ScoredTrack {
    TrackId id;
    std::vector<std::int64_t> frames;
    std::vector<std::optional<double>> scores;
};

std::vector<ScoredTrack> score_tracks(const PreparedMeeting& meeting, const PipelineConfig& cfg) {
    std::vector<ScoredTrack> out;
    for (std::size_t t = 0; t < meeting.tracks.size(); ++t) {
        ScoredTrack st{meeting.tracks[t].id, {}, {}};
        switch (cfg.method) {
            case DetectionMethod::StatProfile:
                st.scores = statistical_scores(meeting.changes[t], cfg.detector);
                for (const auto& s : meeting.changes[t].samples) {
                    st.frames.push_back(s.frame_index);
                }
                break;
            case DetectionMethod::ArimaError:
                st.scores = arima_relative_errors(meeting.changes[t], cfg.detector);
                for (const auto& s : meeting.changes[t].samples) {
                    st.frames.push_back(s.frame_index);
                }
                break;
            case DetectionMethod::TransitionDensity:
                st.scores = transition_shares(meeting.labels[t], cfg.detector.transition_window);
                for (const auto& s : meeting.labels[t].samples) {
                    st.frames.push_back(s.frame_index);
                }
                break;
        }
        out.push_back(std::move(st));
    }
    return out;
}

std::vector<EvalReport> evaluate_video(const SweepVideo& video, const PipelineConfig& base,
                                       const std::vector<GridPoint>& grid) {
    const auto meeting = prepare_meeting(video.stream, base);
    std::vector<EvalReport> counts(grid.size());
    if (meeting.tracks.empty()) {
        for (auto& c : counts) {
            c = score({}, video.truth, meeting.total_frames);
        }
        return counts;
    }
    // Grid is sorted by window, so score series are reused across thresholds and epsilons.
    std::optional<int> current_window;
    std::vector<ScoredTrack> scored;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto cfg = apply(grid[g], base);
        if (current_window != grid[g].window) {
            scored = score_tracks(meeting, cfg);
            current_window = grid[g].window;
        }
        std::vector<AnomalyPoint> points;
        for (const auto& st : scored) {
            for (std::size_t i = 0; i < st.scores.size(); ++i) {
                if (st.scores[i] && *st.scores[i] > grid[g].threshold) {
                    points.push_back({st.id, st.frames[i], *st.scores[i], cfg.method});
                }
            }
        }
        const auto events = aggregate(points, meeting.meeting_size(), cfg.aggregation);
        counts[g] = score(events, video.truth, meeting.total_frames);
    }
    return counts;
}

}  // namespace

EvalReport EvalReport::from_counts(std::int64_t tp, std::int64_t fp, std::int64_t tn, std::int64_t fn) {
    EvalReport r;
    r.tp = tp;
    r.fp = fp;
    r.tn = tn;
    r.fn = fn;
    r.recall = ratio(tp, tp + fn);
    r.precision = ratio(tp, tp + fp);
    r.tnr = ratio(tn, tn + fp);
    r.fpr = ratio(fp, fp + tn);
    return r;
}

double EvalReport::f1() const noexcept {
    if (std::isnan(precision) || std::isnan(recall) || precision + recall == 0.0) {
        return kNaN;
    }
    return 2.0 * precision * recall / (precision + recall);
}

EvalReport& EvalReport::operator+=(const EvalReport& other) {
    *this = from_counts(tp + other.tp, fp + other.fp, tn + other.tn, fn + other.fn);
    return *this;
}

EvalReport score(std::span<const GroupEvent> events, std::span<const GroundTruthWindow> truth,
                 std::int64_t total_frames) {
    const auto predicted = binarize(total_frames, spans(events));
    const auto actual = binarize(total_frames, spans(truth));
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;
    for (std::size_t f = 0; f < predicted.size(); ++f) {
        if (predicted[f] && actual[f]) {
            ++tp;
        } else if (predicted[f]) {
            ++fp;
        } else if (actual[f]) {
            ++fn;
        } else {
            ++tn;
        }
    }
    return EvalReport::from_counts(tp, fp, tn, fn);
}

double EventMatch::recall() const noexcept {
    return truth_total > 0 ? static_cast<double>(truth_found) / static_cast<double>(truth_total) : kNaN;
}

double EventMatch::precision() const noexcept {
    return predicted_total > 0 ? static_cast<double>(predicted_correct) / static_cast<double>(predicted_total)
                               : kNaN;
}

EventMatch& EventMatch::operator+=(const EventMatch& other) {
    truth_total += other.truth_total;
    truth_found += other.truth_found;
    predicted_total += other.predicted_total;
    predicted_correct += other.predicted_correct;
    return *this;
}

EventMatch match_events(std::span<const GroupEvent> events, std::span<const GroundTruthWindow> truth) {
    const auto overlaps = [](const GroupEvent& e, const GroundTruthWindow& t) {
        return e.start_frame <= t.end_frame && t.start_frame <= e.end_frame;
    };
    EventMatch m;
    m.truth_total = truth.size();
    m.predicted_total = events.size();
    for (const auto& t : truth) {
        if (std::any_of(events.begin(), events.end(), [&](const GroupEvent& e) { return overlaps(e, t); })) {
            ++m.truth_found;
        }
    }
    for (const auto& e : events) {
        if (std::any_of(truth.begin(), truth.end(), [&](const GroundTruthWindow& t) { return overlaps(e, t); })) {
            ++m.predicted_correct;
        }
    }
    return m;
}

std::vector<GridPoint> SweepGrid::points() const {
    auto w = windows;
    auto th = thresholds;
    auto eps = epsilons;
    std::sort(w.begin(), w.end());
    std::sort(th.begin(), th.end());
    std::sort(eps.begin(), eps.end());
    std::vector<GridPoint> out;
    out.reserve(size());
    for (const int a : w) {
        for (const double b : th) {
            for (const auto c : eps) {
                out.push_back({a, b, c});
            }
        }
    }
    return out;
}

SweepGrid default_grid(DetectionMethod method, const PipelineConfig& base) {
    SweepGrid grid;
    for (std::int64_t e = 5; e <= 21; e += 2) {
        grid.epsilons.push_back(e);
    }
    switch (method) {
        case DetectionMethod::StatProfile:
            for (int w = 5; w <= 15; w += 2) {
                grid.windows.push_back(w);
            }
            for (int i = 0; i <= 15; ++i) {
                grid.thresholds.push_back(1.5 + 0.1 * i);
            }
            break;
        case DetectionMethod::ArimaError:
            grid.windows.push_back(base.detector.arima_window);
            for (int i = 0; i <= 6; ++i) {
                grid.thresholds.push_back(0.3 + 0.1 * i);
            }
            break;
        case DetectionMethod::TransitionDensity:
            for (int w = 3; w <= 9; w += 2) {
                grid.windows.push_back(w);
            }
            grid.thresholds.push_back(base.detector.transition_fraction);
            break;
    }
    return grid;
}

PipelineConfig apply(const GridPoint& point, const PipelineConfig& base) {
    PipelineConfig cfg = base;
    cfg.aggregation.epsilon = point.epsilon;
    switch (cfg.method) {
        case DetectionMethod::StatProfile:
            cfg.detector.window_w = point.window;
            cfg.detector.std_threshold = point.threshold;
            break;
        case DetectionMethod::ArimaError:
            cfg.detector.arima_window = point.window;
            cfg.detector.arima_threshold = point.threshold;
            break;
        case DetectionMethod::TransitionDensity:
            cfg.detector.transition_window = point.window;
            cfg.detector.transition_fraction = point.threshold;
            break;
    }
    return cfg;
}

Objective parse_objective(std::string_view name) {
    if (name == "precision") {
        return Objective::Precision;
    }
    if (name == "recall") {
        return Objective::Recall;
    }
    if (name == "f1") {
        return Objective::F1;
    }
    throw ConfigError("unknown objective '" + std::string(name) + "' (precision|recall|f1)");
}

std::string_view to_string(Objective o) noexcept {
    switch (o) {
        case Objective::Recall:
            return "recall";
        case Objective::F1:
            return "f1";
        case Objective::Precision:
            break;
    }
    return "precision";
}

EvalReport SweepTable::pooled(std::span<const std::size_t> videos, std::size_t grid_index) const {
    EvalReport r = EvalReport::from_counts(0, 0, 0, 0);
    for (const std::size_t v : videos) {
        r += counts[v][grid_index];
    }
    return r;
}

std::size_t SweepTable::select(std::span<const std::size_t> videos, Objective objective) const {
    std::size_t best = 0;
    double best_obj = -2.0;
    double best_recall = -2.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto r = pooled(videos, g);
        const double obj = objective_value(r, objective);
        const double rec = std::isnan(r.recall) ? -1.0 : r.recall;
        if (obj > best_obj || (obj == best_obj && rec > best_recall)) {
            best = g;
            best_obj = obj;
            best_recall = rec;
        }
    }
    return best;
}

SweepTable build_sweep_table(std::span<const SweepVideo> videos, const PipelineConfig& base,
                             const SweepGrid& grid, unsigned threads) {
    SweepTable table;
    table.grid = grid.points();
    if (table.grid.empty()) {
        throw ConfigError("sweep grid is empty");
    }
    for (const auto& p : table.grid) {
        apply(p, base).validate();
    }
    table.counts.resize(videos.size());
    const unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(videos.size())));
    if (workers == 1) {
        for (std::size_t v = 0; v < videos.size(); ++v) {
            table.counts[v] = evaluate_video(videos[v], base, table.grid);
        }
        return table;
    }
    // Each worker owns a fixed stride of videos and writes only its own slots.
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t v = w; v < videos.size(); v += workers) {
                    table.counts[v] = evaluate_video(videos[v], base, table.grid);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return table;
}

ArimaOrder dataset_arima_order(std::span<const SweepVideo> videos, const PipelineConfig& base,
                               const AutoOrderOptions& options) {
    std::map<std::tuple<int, int, int>, std::size_t> votes;
    for (const auto& video : videos) {
        const auto meeting = prepare_meeting(video.stream, base);
        for (const auto& series : meeting.changes) {
            if (series.samples.size() < 30) {
                continue;
            }
            const auto o = auto_order(series.values(), options);
            ++votes[{o.p, o.d, o.q}];
        }
    }
    if (votes.empty()) {
        return base.detector.arima_order;
    }
    auto best = votes.begin();
    for (auto it = votes.begin(); it != votes.end(); ++it) {
        if (it->second > best->second) {
            best = it;
        }
    }
    const auto [p, d, q] = best->first;
    return ArimaOrder{p, d, q};
}

SweepResult sweep(std::span<const SweepVideo> videos, const PipelineConfig& base, const SweepGrid& grid,
                  const SweepOptions& options) {
    if (grid.size() == 0) {
        throw ConfigError("sweep grid is empty");
    }
    if (options.folds < 2) {
        throw ConfigError("sweep needs at least 2 folds");
    }
    if (videos.size() < options.folds) {
        throw ConfigError("sweep needs at least as many videos (" + std::to_string(videos.size()) +
                          ") as folds (" + std::to_string(options.folds) + ")");
    }
    PipelineConfig cfg = base;
    if (options.auto_arima_order && cfg.method == DetectionMethod::ArimaError) {
        cfg.detector.arima_order = dataset_arima_order(videos, cfg);
    }
    const auto table = build_sweep_table(videos, cfg, grid, options.threads);

    std::vector<std::size_t> order(videos.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(options.seed);
    std::shuffle(order.begin(), order.end(), rng);

    SweepResult result;
    result.method = cfg.method;
    result.arima_order = cfg.detector.arima_order;
    result.grid_size = table.grid.size();
    struct Accum {
        double sum = 0.0;
        std::size_t n = 0;
        void add(double v) {
            if (!std::isnan(v)) {
                sum += v;
                ++n;
            }
        }
        [[nodiscard]] double mean() const { return n > 0 ? sum / static_cast<double>(n) : kNaN; }
    } recall, precision, tnr, fpr;

    for (std::size_t k = 0; k < options.folds; ++k) {
        std::vector<std::size_t> train;
        std::vector<std::size_t> test;
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            (pos % options.folds == k ? test : train).push_back(order[pos]);
        }
        std::sort(train.begin(), train.end());
        std::sort(test.begin(), test.end());
        const std::size_t g = table.select(train, options.objective);
        FoldResult fold{test, table.grid[g], table.pooled(train, g), table.pooled(test, g)};
        recall.add(fold.test.recall);
        precision.add(fold.test.precision);
        tnr.add(fold.test.tnr);
        fpr.add(fold.test.fpr);
        result.folds.push_back(std::move(fold));
    }
    result.mean = {recall.mean(), precision.mean(), tnr.mean(), fpr.mean()};
    return result;
}

}  // namespace vcad
