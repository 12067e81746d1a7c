#include "vcad/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "vcad/errors.hpp"
#include "vcad/features.hpp"

namespace vcad {

namespace {

using Vec7 = std::array<double, kExpressionCount>;

constexpr double kCanvasWidth = 1280.0;
constexpr double kCanvasHeight = 720.0;
constexpr double kPullGain = 0.5;
constexpr double kHoldBlend = 0.85;
constexpr std::int64_t kSettleFrames = 80;

double norm(const Vec7& v) {
    double s = 0.0;
    for (const double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

Vec7 sub(const Vec7& a, const Vec7& b) {
    Vec7 r{};
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = a[i] - b[i];
    }
    return r;
}

struct Participant {
    Vec7 rest{};
    Vec7 pos{};
    Expression dominant = Expression::Neutral;
    std::vector<double> identity;
    BoundingBox cell_box;
};

Vec7 resting_expression(std::mt19937_64& rng, Expression& dominant) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Mostly neutral listeners, some smiling ones.
    dominant = unit(rng) < 0.75 ? Expression::Neutral : Expression::Happiness;
    Vec7 v;
    v.fill(0.04);
    const double lead = 0.45 + 0.15 * unit(rng);
    v[static_cast<std::size_t>(dominant)] += lead;
    double remaining = 1.0 - 0.04 * kExpressionCount - lead;
    Vec7 w{};
    double wsum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i != static_cast<std::size_t>(dominant)) {
            w[i] = unit(rng) + 1e-3;
            wsum += w[i];
        }
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
        v[i] += remaining * w[i] / wsum;
    }
    return v;
}

// Unit zero-sum direction (tangent to the probability simplex).
Vec7 tangent_direction(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec7 g{};
    for (double& x : g) {
        x = gauss(rng);
    }
    const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
    for (double& x : g) {
        x -= mean;
    }
    const double n = norm(g);
    for (double& x : g) {
        x /= n;
    }
    return g;
}

void renormalize(Vec7& v) {
    const double s = std::accumulate(v.begin(), v.end(), 0.0);
    for (double& x : v) {
        x /= s;
    }
}

// One calm step of fixed length toward `target` with random wander.
void walk(Participant& p, const Vec7& target, double step, std::mt19937_64& rng) {
    const Vec7 pull = sub(target, p.pos);
    for (int attempt = 0; attempt < 64; ++attempt) {
        Vec7 dir = tangent_direction(rng);
        for (std::size_t i = 0; i < dir.size(); ++i) {
            dir[i] += kPullGain * pull[i] / step;
        }
        const double n = norm(dir);
        Vec7 next = p.pos;
        bool ok = n > 0.0;
        for (std::size_t i = 0; ok && i < next.size(); ++i) {
            next[i] += step * dir[i] / n;
            ok = next[i] >= 0.0;
        }
        if (ok) {
            p.pos = next;
            renormalize(p.pos);
            return;
        }
    }
    // Straight toward the target, which is interior.
    const double dist = norm(pull);
    const double len = std::min(step, dist);
    for (std::size_t i = 0; i < p.pos.size() && dist > 0.0; ++i) {
        p.pos[i] += len * pull[i] / dist;
    }
    renormalize(p.pos);
}

void jump(Participant& p, const Vec7& target, double intensity) {
    const Vec7 d = sub(target, p.pos);
    const double dist = norm(d);
    if (dist == 0.0) {
        return;
    }
    const double len = std::min(intensity, dist);
    for (std::size_t i = 0; i < p.pos.size(); ++i) {
        p.pos[i] += len * d[i] / dist;
    }
    renormalize(p.pos);
}

Vec7 hold_point(const Participant& p, std::mt19937_64& rng) {
    // Two categories other than the participant's resting one, blended evenly
    // so the dominant label flickers while the reaction lasts.
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < kExpressionCount; ++i) {
        if (i != static_cast<std::size_t>(p.dominant) && i != static_cast<std::size_t>(Expression::Neutral)) {
            pool.push_back(i);
        }
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    Vec7 v{};
    v[pool[0]] = 0.5;
    v[pool[1]] = 0.5;
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = kHoldBlend * v[i] + (1.0 - kHoldBlend) * p.rest[i];
    }
    return v;
}

// 128 x 7 matrix with orthonormal columns, so embedding moves are isometric
// to expression moves.
std::vector<std::array<double, kEmbeddingSize>> isometry(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::array<double, kEmbeddingSize>> cols(kExpressionCount);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        for (double& x : cols[c]) {
            x = gauss(rng);
        }
        for (std::size_t prev = 0; prev < c; ++prev) {
            double dot = 0.0;
            for (std::size_t i = 0; i < kEmbeddingSize; ++i) {
                dot += cols[c][i] * cols[prev][i];
            }
            for (std::size_t i = 0; i < kEmbeddingSize; ++i) {
                cols[c][i] -= dot * cols[prev][i];
            }
        }
        double n = 0.0;
        for (const double x : cols[c]) {
            n += x * x;
        }
        n = std::sqrt(n);
        for (double& x : cols[c]) {
            x /= n;
        }
    }
    return cols;
}

std::size_t affected_count(double fraction, std::size_t participants) {
    const auto n = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(participants) - 1e-9));
    return std::min(n, participants);
}

}  // namespace

void SyntheticScenario::validate() const {
    if (participant_count == 0) {
        throw ValidationError("scenario: participant_count must be positive");
    }
    if (duration_frames <= 0) {
        throw ValidationError("scenario: duration_frames must be positive");
    }
    if (!(noise_scale > 0.0) || !(fps > 0.0)) {
        throw ValidationError("scenario: noise_scale and fps must be positive");
    }
    if (!(step_jitter >= 0.0 && step_jitter < 1.0)) {
        throw ValidationError("scenario: step_jitter must lie in [0, 1)");
    }
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        const std::string where = "scenario: event " + std::to_string(i) + ": ";
        if (e.onset_frame < 0 || e.onset_frame >= duration_frames) {
            throw ValidationError(where + "onset outside the meeting");
        }
        if (e.duration_frames <= 0) {
            throw ValidationError(where + "duration must be positive");
        }
        if (!(e.affected_fraction > 0.0 && e.affected_fraction <= 1.0)) {
            throw ValidationError(where + "affected_fraction must lie in (0, 1]");
        }
        if (!(e.intensity >= 0.0)) {
            throw ValidationError(where + "intensity must be non-negative");
        }
    }
}

SyntheticMeeting generate(const SyntheticScenario& scenario) {
    scenario.validate();
    std::mt19937_64 rng(scenario.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = scenario.participant_count;

    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    const std::size_t rows = (n + cols - 1) / cols;
    const double cell_w = kCanvasWidth / static_cast<double>(cols);
    const double cell_h = kCanvasHeight / static_cast<double>(rows);
    const double side = 0.5 * std::min(cell_w, cell_h);

    const auto basis = isometry(rng);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Participant> people(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& p = people[i];
        p.rest = resting_expression(rng, p.dominant);
        p.pos = p.rest;
        p.identity.resize(kEmbeddingSize);
        double len = 0.0;
        for (double& x : p.identity) {
            x = gauss(rng);
            len += x * x;
        }
        len = std::sqrt(len);
        for (double& x : p.identity) {
            x /= len;
        }
        const double cx = (static_cast<double>(i % cols) + 0.5) * cell_w;
        const double cy = (static_cast<double>(i / cols) + 0.5) * cell_h;
        p.cell_box = {cx - side / 2, cy - side / 2, cx + side / 2, cy + side / 2};
    }

    // Per participant: frame ranges during which they hold an event expression.
    struct Reaction {
        std::int64_t begin;
        std::int64_t end;  // exclusive
        Vec7 hold;
        double intensity;
    };
    std::vector<std::vector<Reaction>> reactions(n);
    SyntheticMeeting out;
    const auto max_jitter = static_cast<std::int64_t>(std::llround(2.0 * scenario.fps));
    std::uniform_int_distribution<std::int64_t> jitter(0, max_jitter);
    for (const auto& ev : scenario.events) {
        if (ev.intensity <= 0.0) {
            continue;
        }
        out.truth.push_back({ev.onset_frame,
                             std::min(ev.onset_frame + ev.duration_frames, scenario.duration_frames) - 1,
                             ev.label});
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        order.resize(affected_count(ev.affected_fraction, n));
        std::sort(order.begin(), order.end());
        for (const std::size_t who : order) {
            const std::int64_t begin = ev.onset_frame + jitter(rng);
            const std::int64_t end = ev.onset_frame + ev.duration_frames;
            if (begin < end) {
                reactions[who].push_back({begin, end, hold_point(people[who], rng), ev.intensity});
            }
        }
    }

    out.stream.metadata = {scenario.fps, scenario.duration_frames,
                           "synthetic:seed=" + std::to_string(scenario.seed)};
    std::uniform_real_distribution<double> step_noise(-scenario.step_jitter, scenario.step_jitter);
    std::uniform_real_distribution<double> box_noise(-1.0, 1.0);
    std::uniform_real_distribution<double> shift(-2.0, 2.0);
    for (std::int64_t f = 0; f < scenario.duration_frames; ++f) {
        FrameRecord rec;
        rec.frame_index = f;
        for (std::size_t i = 0; i < n; ++i) {
            auto& p = people[i];
            const Reaction* active = nullptr;
            for (const auto& r : reactions[i]) {
                if (f >= r.begin && f < r.end) {
                    active = &r;
                }
            }
            if (f > 0) {
                if (active != nullptr && f == active->begin) {
                    jump(p, active->hold, active->intensity);
                } else {
                    walk(p, active != nullptr ? active->hold : p.rest,
                         scenario.noise_scale * (1.0 + step_noise(rng)), rng);
                }
            }

            FaceObservation obs;
            obs.frame_index = f;
            obs.box = {p.cell_box.x_min + box_noise(rng), p.cell_box.y_min + box_noise(rng),
                       p.cell_box.x_max + box_noise(rng), p.cell_box.y_max + box_noise(rng)};
            obs.expression.assign(p.pos.begin(), p.pos.end());
            obs.expression_label = dominant_expression(obs.expression);
            obs.embedding = p.identity;
            for (std::size_t c = 0; c < kExpressionCount; ++c) {
                const double w = scenario.embedding_scale * p.pos[c];
                for (std::size_t k = 0; k < kEmbeddingSize; ++k) {
                    obs.embedding[k] += w * basis[c][k];
                }
            }
            if (scenario.dual_channel) {
                FaceObservation second;
                second.frame_index = f;
                const double dx = shift(rng);
                const double dy = shift(rng);
                second.box = {std::max(0.0, obs.box.x_min - 3.0 + dx), std::max(0.0, obs.box.y_min - 3.0 + dy),
                              obs.box.x_max + 3.0 + dx, obs.box.y_max + 3.0 + dy};
                rec.faces.push_back({std::move(obs), Channel::A});
                rec.faces.push_back({std::move(second), Channel::B});
            } else {
                rec.faces.push_back({std::move(obs), Channel::None});
            }
        }
        out.stream.frames.push_back(std::move(rec));
    }
    return out;
}

SyntheticScenario random_scenario(std::uint64_t seed, const ScenarioSpace& space) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto pick = [&](auto lo, auto hi) {
        using T = decltype(lo);
        return std::uniform_int_distribution<T>(lo, hi)(rng);
    };

    SyntheticScenario sc;
    sc.seed = seed;
    sc.fps = space.fps;
    sc.noise_scale = space.noise_scale;
    sc.dual_channel = space.dual_channel;
    sc.participant_count = pick(space.participants_min, space.participants_max);
    sc.duration_frames = pick(space.duration_min, space.duration_max);

    const std::size_t count = space.events_max == 0 ? 0 : pick(space.events_min, space.events_max);
    std::vector<std::int64_t> durations;
    const double log_lo = std::log(space.event_seconds_min);
    const double log_hi = std::log(space.event_seconds_max);
    for (std::size_t i = 0; i < count; ++i) {
        const double seconds = std::exp(log_lo + (log_hi - log_lo) * unit(rng));
        durations.push_back(std::max<std::int64_t>(1, std::llround(seconds * space.fps)));
    }
    const std::int64_t busy = std::accumulate(durations.begin(), durations.end(), std::int64_t{0}) +
                              static_cast<std::int64_t>(count + 1) * kSettleFrames;
    const std::int64_t slack = std::max<std::int64_t>(0, sc.duration_frames - busy);
    std::vector<std::int64_t> cuts;
    for (std::size_t i = 0; i < count; ++i) {
        cuts.push_back(pick(std::int64_t{0}, slack));
    }
    std::sort(cuts.begin(), cuts.end());
    std::int64_t cursor = 0;
    std::int64_t used_slack = 0;
    for (std::size_t i = 0; i < count; ++i) {
        cursor += kSettleFrames + (cuts[i] - used_slack);
        used_slack = cuts[i];
        SyntheticEvent ev;
        ev.onset_frame = cursor;
        ev.duration_frames = durations[i];
        ev.affected_fraction = space.affected_min + (space.affected_max - space.affected_min) * unit(rng);
        ev.intensity = space.noise_scale *
                       (space.intensity_min + (space.intensity_max - space.intensity_min) * unit(rng));
        ev.label = "event" + std::to_string(i);
        sc.events.push_back(ev);
        cursor += durations[i];
    }
    sc.duration_frames = std::max(sc.duration_frames, cursor + kSettleFrames);
    return sc;
}

}  // namespace vcad
