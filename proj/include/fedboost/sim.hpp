#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "boost.hpp"
#include "config.hpp"
#include "data.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "scheduler.hpp"
#include "stump.hpp"

// Deterministic discrete-event simulation of the asynchronous federation,
// plus the barrier-synchronized baseline. Clients train and buffer weak
// learners locally; the server aggregates with staleness decay, re-evaluates
// the ensemble, runs the interval controller, and answers the uploader.

namespace fedboost {

// Fixed message-size model for the byte counters. An upload carries its
// buffered learners; a broadcast carries the new interval, the aggregation
// count, and one weight per ensemble member the receiving client has not
// seen yet. Counters use sent-time accounting.
constexpr std::int64_t kMessageHeaderBytes = 24;
constexpr std::int64_t kLearnerWireBytes = 40;
constexpr std::int64_t kBroadcastFixedBytes = 16;
constexpr std::int64_t kMemberWeightWireBytes = 8;

inline std::int64_t upload_bytes(std::size_t learners) {
    return kMessageHeaderBytes + kLearnerWireBytes * static_cast<std::int64_t>(learners);
}

inline std::int64_t broadcast_bytes(std::size_t new_members) {
    return kMessageHeaderBytes + kBroadcastFixedBytes +
           kMemberWeightWireBytes * static_cast<std::int64_t>(new_members);
}

struct ClientState {
    int client_id = 0;
    Dataset shard;
    DistributionVector dist;
    std::vector<BufferedLearner> buffer;
    int rounds_until_sync = 1;
    std::uint64_t snapshot_round = 0;  // server aggregation count at last sync
    int current_interval = 1;
    double compute_time = 1.0;   // seconds per local round
    double link_latency = 0.0;   // one-way seconds
    double dropout_prob = 0.0;   // per-round skip probability, in [0, 1)
    std::uint64_t local_seq = 0; // next accepted-learner sequence number
    std::size_t known_members = 0;  // ensemble size last broadcast to this client
    rng::SplitMix64 dropout_rng{0};
};

enum class EventKind : int { client_round_start = 0, upload_arrival = 1, broadcast_arrival = 2 };

struct SimEvent {
    double time = 0.0;
    EventKind kind = EventKind::client_round_start;
    int client_id = 0;
    std::vector<BufferedLearner> payload;  // upload_arrival only
    int interval = 1;                      // broadcast_arrival only
    std::uint64_t aggregation_count = 0;   // broadcast_arrival only
};

// Total order: (time, kind as listed above, client_id). At most one event of
// a given kind is in flight per client, so the triple is unique.
struct EventAfter {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
        if (a.time != b.time) return a.time > b.time;
        if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
        return a.client_id > b.client_id;
    }
};

struct DistSnapshot {
    int client_id = 0;
    std::uint64_t local_seq = 0;
    DistributionVector dist;  // after the round's update
};

struct AcceptedLearnerLog {
    std::int64_t aggregation_index = 0;
    BufferedLearner learner;
    std::uint64_t tau = 0;
    double effective_weight = 0.0;
};

struct SimTrace {
    std::vector<MetricsRecord> records;          // one per aggregation, plus record 0
    std::vector<AcceptedLearnerLog> learners;    // in ensemble order
    std::vector<DistSnapshot> dist_snapshots;    // only when record_distributions is set
    Ensemble final_ensemble;
    std::optional<std::size_t> converged_at;     // record position
    std::size_t discarded_learners = 0;          // trained with raw error >= 0.5
    std::size_t dropped_rounds = 0;
};

struct SimSetup {
    Dataset train_pool;  // union of the client shards
    Dataset validation;  // disjoint server-held split
    std::vector<ClientState> clients;
};

// Data generation, validation split, shard assignment, and per-client
// heterogeneity draws (compute, link, dropout — in that order per client,
// from the latency stream).
inline SimSetup prepare_simulation(const ExperimentConfig& config) {
    config.validate();
    SimSetup setup;
    const Dataset full =
        data::generate_gaussians(config.samples, config.dimension, config.sigma,
                                 config.positive_fraction, config.effective_data_seed());
    data::ValidationSplit split = data::split_validation(full, config.validation_fraction);
    setup.train_pool = std::move(split.train);
    setup.validation = std::move(split.validation);

    std::vector<Dataset> shards = data::partition_dirichlet(
        setup.train_pool, config.clients, config.concentration, config.effective_partition_seed());

    const std::uint64_t het_seed = config.effective_heterogeneity_seed();
    rng::SplitMix64 het(rng::stream_seed(het_seed, rng::Stream::latency));
    setup.clients.reserve(config.clients);
    for (std::size_t c = 0; c < config.clients; ++c) {
        ClientState client;
        client.client_id = static_cast<int>(c);
        client.shard = std::move(shards[c]);
        client.dist = uniform_distribution(client.shard.size());
        client.rounds_until_sync = config.initial_interval;
        client.current_interval = config.initial_interval;
        client.compute_time = het.next_in(config.compute_time_min, config.compute_time_max);
        client.link_latency = het.next_in(config.link_latency_min, config.link_latency_max);
        client.dropout_prob = het.next_in(config.dropout_min, config.dropout_max);
        client.dropout_rng =
            rng::SplitMix64(rng::substream_seed(het_seed, rng::Stream::dropout, c));
        setup.clients.push_back(std::move(client));
    }
    return setup;
}

enum class RoundOutcome { dropped, accepted, discarded };

// One local boosting round. A dropped round burns time only; a trained round
// counts toward the interval. Learners with raw error >= 0.5 are discarded
// and leave the local distribution untouched.
inline RoundOutcome client_local_round(ClientState& client, const ExperimentConfig& config,
                                       SimTrace& trace) {
    const double u = client.dropout_rng.next_double();  // always drawn, even at prob 0
    if (u < client.dropout_prob) {
        ++trace.dropped_rounds;
        return RoundOutcome::dropped;
    }
    const StumpFit fit = train_stump(client.shard, client.dist);
    --client.rounds_until_sync;
    if (fit.error >= 0.5) {
        ++trace.discarded_learners;
        return RoundOutcome::discarded;
    }
    BufferedLearner learner;
    learner.stump = fit.stump;
    learner.raw_epsilon = fit.error;
    learner.epsilon = std::clamp(fit.error, config.eps_floor, 1.0 - config.eps_floor);
    learner.alpha = learner_weight(fit.error, config.eps_floor);
    learner.client_id = client.client_id;
    learner.snapshot_round = client.snapshot_round;
    learner.local_seq = client.local_seq++;
    client.buffer.push_back(learner);

    DistributionUpdate update =
        update_distribution(client.dist, learner.stump, learner.alpha, client.shard);
    client.dist = std::move(update.dist);
    if (config.record_distributions)
        trace.dist_snapshots.push_back({client.client_id, learner.local_seq, client.dist});
    return RoundOutcome::accepted;
}

struct ServerState {
    Ensemble ensemble;
    std::uint64_t aggregation_count = 0;
    SchedulerState scheduler;
    MarginAccumulator val_margins;
    MarginAccumulator train_margins;

    ServerState(const SimSetup& setup, double lambda, int initial_interval)
        : ensemble{{}, lambda},
          scheduler{initial_interval, std::nullopt},
          val_margins(setup.validation),
          train_margins(setup.train_pool) {}
};

// One server aggregation event: staleness per learner is the number of
// aggregations that happened strictly after the learner's snapshot and
// strictly before this one.
inline void ingest_aggregation(ServerState& server, const std::vector<BufferedLearner>& learners,
                               SimTrace& trace) {
    ++server.aggregation_count;
    const std::uint64_t age = server.aggregation_count - 1;
    for (const BufferedLearner& learner : learners) {
        const std::uint64_t tau =
            age > learner.snapshot_round ? age - learner.snapshot_round : 0;
        EnsembleMember member{learner, tau,
                              decayed_weight(learner.alpha, tau, server.ensemble.lambda)};
        server.ensemble.members.push_back(member);
        server.val_margins.add(member);
        server.train_margins.add(member);
        trace.learners.push_back({static_cast<std::int64_t>(server.aggregation_count), learner,
                                  tau, member.effective_weight});
    }
}

struct WireCounters {
    std::int64_t uploads = 0;
    std::int64_t broadcasts = 0;
    std::int64_t bytes = 0;
};

inline void append_record(SimTrace& trace, const ServerState& server, double vtime,
                          const WireCounters& counters, int interval) {
    MetricsRecord r;
    r.aggregation_index = static_cast<std::int64_t>(server.aggregation_count);
    r.virtual_time = vtime;
    r.cumulative_uploads = counters.uploads;
    r.cumulative_broadcasts = counters.broadcasts;
    r.cumulative_bytes = counters.bytes;
    r.validation_error = server.val_margins.error();
    r.training_error = server.train_margins.error();
    r.current_interval = interval;
    trace.records.push_back(r);
}

namespace detail {

// Initial state shared by both modes: the server announces itself to every
// client (k empty broadcasts) and record 0 captures the empty ensemble.
inline bool begin_trace(SimTrace& trace, ServerState& server, WireCounters& counters,
                        const ExperimentConfig& config) {
    counters.broadcasts += static_cast<std::int64_t>(config.clients);
    counters.bytes += static_cast<std::int64_t>(config.clients) * broadcast_bytes(0);
    append_record(trace, server, 0.0, counters, server.scheduler.interval);
    const bool converged =
        config.stop_on_convergence &&
        detect_convergence(trace.records, config.convergence).has_value();
    return !converged && config.max_aggregations > 0;
}

inline bool should_stop(const SimTrace& trace, const ServerState& server,
                        const ExperimentConfig& config) {
    if (server.aggregation_count >= static_cast<std::uint64_t>(config.max_aggregations))
        return true;
    return config.stop_on_convergence &&
           detect_convergence(trace.records, config.convergence).has_value();
}

}  // namespace detail

// Asynchronous event loop; covers async_adaptive and (with the thresholds
// pinned to +-infinity, which freezes the interval) async_fixed.
inline SimTrace run_async(const ExperimentConfig& config) {
    SimSetup setup = prepare_simulation(config);
    SchedulerParams sched = config.scheduler;
    if (config.mode == Mode::async_fixed) {
        sched.theta1 = -std::numeric_limits<double>::infinity();
        sched.theta2 = std::numeric_limits<double>::infinity();
    }

    ServerState server(setup, config.lambda, config.initial_interval);
    SimTrace trace;
    WireCounters counters;
    bool running = detail::begin_trace(trace, server, counters, config);

    std::priority_queue<SimEvent, std::vector<SimEvent>, EventAfter> queue;
    if (running) {
        for (const ClientState& c : setup.clients)
            queue.push({0.0, EventKind::client_round_start, c.client_id, {}, 0, 0});
    }

    while (running && !queue.empty()) {
        const SimEvent ev = queue.top();
        queue.pop();
        if (ev.time > config.max_virtual_time) break;
        ClientState& client = setup.clients[static_cast<std::size_t>(ev.client_id)];

        switch (ev.kind) {
            case EventKind::client_round_start: {
                client_local_round(client, config, trace);
                const double done_at = ev.time + client.compute_time;
                if (client.rounds_until_sync <= 0) {
                    if (!client.buffer.empty()) {
                        counters.uploads += 1;
                        counters.bytes += upload_bytes(client.buffer.size());
                        SimEvent upload{done_at + client.link_latency, EventKind::upload_arrival,
                                        client.client_id, std::move(client.buffer), 0, 0};
                        client.buffer.clear();
                        queue.push(std::move(upload));
                        // client idles until the answering broadcast arrives
                    } else {
                        // everything dropped or discarded: skip the upload
                        client.rounds_until_sync = client.current_interval;
                        queue.push({done_at, EventKind::client_round_start, client.client_id,
                                    {}, 0, 0});
                    }
                } else {
                    queue.push({done_at, EventKind::client_round_start, client.client_id,
                                {}, 0, 0});
                }
                break;
            }
            case EventKind::upload_arrival: {
                ingest_aggregation(server, ev.payload, trace);
                const double epsilon_t = server.val_margins.error();
                server.scheduler = next_interval(server.scheduler, sched, epsilon_t);

                const std::size_t new_members =
                    server.ensemble.members.size() - client.known_members;
                counters.broadcasts += 1;
                counters.bytes += broadcast_bytes(new_members);
                client.known_members = server.ensemble.members.size();
                queue.push({ev.time + client.link_latency, EventKind::broadcast_arrival,
                            client.client_id, {}, server.scheduler.interval,
                            server.aggregation_count});

                append_record(trace, server, ev.time, counters, server.scheduler.interval);
                running = !detail::should_stop(trace, server, config);
                break;
            }
            case EventKind::broadcast_arrival: {
                client.snapshot_round = ev.aggregation_count;
                client.current_interval = ev.interval;
                client.rounds_until_sync = ev.interval;
                queue.push({ev.time, EventKind::client_round_start, client.client_id, {}, 0, 0});
                break;
            }
        }
    }

    trace.final_ensemble = std::move(server.ensemble);
    trace.converged_at = detect_convergence(trace.records, config.convergence);
    return trace;
}

// Barrier-synchronized baseline: one local round per client per global
// round; the server aggregates all non-dropped uploads at once (staleness is
// always zero) and broadcasts to everyone. Rounds where every client drops
// advance time without an aggregation.
inline SimTrace run_synchronous(const ExperimentConfig& config) {
    SimSetup setup = prepare_simulation(config);
    ServerState server(setup, config.lambda, 1);
    SimTrace trace;
    WireCounters counters;
    bool running = detail::begin_trace(trace, server, counters, config);

    const std::size_t k = setup.clients.size();
    std::vector<double> go(k, 0.0);  // when each client starts the next round
    std::vector<BufferedLearner> batch;

    while (running) {
        if (*std::min_element(go.begin(), go.end()) > config.max_virtual_time) break;

        batch.clear();
        double agg_at = 0.0;
        bool any_upload = false;
        for (std::size_t c = 0; c < k; ++c) {
            ClientState& client = setup.clients[c];
            client.rounds_until_sync = 1;
            const RoundOutcome outcome = client_local_round(client, config, trace);
            if (outcome == RoundOutcome::dropped) continue;
            // non-dropped clients always upload, even an empty buffer
            counters.uploads += 1;
            counters.bytes += upload_bytes(client.buffer.size());
            for (BufferedLearner& l : client.buffer) batch.push_back(std::move(l));
            client.buffer.clear();
            agg_at = std::max(agg_at, go[c] + client.compute_time + client.link_latency);
            any_upload = true;
        }

        if (!any_upload) {  // a fully dropped round: no barrier release
            for (std::size_t c = 0; c < k; ++c) go[c] += setup.clients[c].compute_time;
            continue;
        }

        ingest_aggregation(server, batch, trace);
        for (std::size_t c = 0; c < k; ++c) {
            ClientState& client = setup.clients[c];
            const std::size_t new_members = server.ensemble.members.size() - client.known_members;
            counters.broadcasts += 1;
            counters.bytes += broadcast_bytes(new_members);
            client.known_members = server.ensemble.members.size();
            client.snapshot_round = server.aggregation_count;
            go[c] = agg_at + client.link_latency;
        }
        append_record(trace, server, agg_at, counters, 1);
        running = !detail::should_stop(trace, server, config);
    }

    trace.final_ensemble = std::move(server.ensemble);
    trace.converged_at = detect_convergence(trace.records, config.convergence);
    return trace;
}

inline SimTrace run_simulation(const ExperimentConfig& config) {
    return config.mode == Mode::synchronous ? run_synchronous(config) : run_async(config);
}

inline SimTrace run_with_mode(ExperimentConfig config, Mode mode) {
    config.mode = mode;
    return run_simulation(config);
}

}  // namespace fedboost
