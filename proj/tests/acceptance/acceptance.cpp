// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Usage: acceptance [N]   (run criterion N alone; no argument runs all)
// Exit codes: 0 all run criteria passed, 1 any failed, 77 criterion skipped
// because its dataset is not present (MNIST must be downloaded by hand).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dwmtj/clustering.hpp"
#include "dwmtj/decoder.hpp"
#include "dwmtj/experiment.hpp"
#include "dwmtj/rng.hpp"

using namespace dwmtj;
namespace fs = std::filesystem;

namespace {

const fs::path kSourceDir = DWMTJ_SOURCE_DIR;

int g_failures = 0;
bool g_skipped = false;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void report_skip(int criterion, const std::string& name, const std::string& why) {
    std::printf("[SKIP] criterion %d: %s — %s\n", criterion, name.c_str(), why.c_str());
    std::fflush(stdout);
    g_skipped = true;
}

DeviceParams reference_params() {
    DeviceParams p;
    p.mobility_neuron = 0.02;
    return p;
}

// ---------------------------------------------------------------- criterion 1

void criterion_device_properties() {
    const DeviceParams p = reference_params();
    Rng rng(20260808);
    bool ok = true;
    std::string detail = "bounds, polarity, clamp fuzz, latch, reset all hold";

    // Conductance bounds and weight range on random states.
    for (int i = 0; i < 10000 && ok; ++i) {
        const SynapseState s{rng.uniform(0.0, p.track_width_synapse)};
        const double g = synapse_conductance(s, p);
        const double w = synapse_weight(g, p);
        if (g < p.g_antiparallel || g > p.g_parallel || w < 0.0 || w > 1.0) {
            ok = false;
            detail = "conductance or weight out of range";
        }
    }

    // Table I polarity, row for row.
    for (int i = 0; i < 10000 && ok; ++i) {
        const SynapseState s{rng.uniform(0.01, 0.99)};
        const double g0 = synapse_conductance(s, p);
        const NeuronState fired{0.0, true};
        const double i_gnd = feedback_current(fired, VoltageLevel::Gnd, p);
        const double i_vdd = feedback_current(fired, VoltageLevel::Vdd, p);
        if (!(i_gnd > 0.0) || !(i_vdd < 0.0)) {
            ok = false;
            detail = "feedback current sign does not match Table I";
            break;
        }
        if (!(synapse_conductance(step_synapse(s, i_gnd, p), p) < g0) ||
            !(synapse_conductance(step_synapse(s, i_vdd, p), p) > g0)) {
            ok = false;
            detail = "conductance update direction does not match Table I";
        }
    }

    // Clamp safety under 1e5 random-current fuzz steps.
    SynapseState s{0.5};
    NeuronState n{1.0, false};
    for (int i = 0; i < 100000 && ok; ++i) {
        s = step_synapse(s, rng.uniform(-100.0, 100.0), p);
        n = step_neuron(n, rng.uniform(0.0, 100.0), p);
        if (s.position < 0.0 || s.position > p.track_width_synapse || n.position < 0.0 ||
            n.position > p.track_width_neuron) {
            ok = false;
            detail = "position escaped the track under fuzz";
        }
    }

    // Fire latch holds until reset; reset is idempotent.
    if (ok) {
        NeuronState hot{p.fire_threshold + 0.01, false};
        hot = step_neuron(hot, 1000.0, p);
        bool latch = hot.fired;
        for (int i = 0; i < 100 && latch; ++i) {
            hot = step_neuron(hot, 0.0, p);
            latch = hot.fired;
        }
        const NeuronState r1 = reset_neuron(hot, p);
        const NeuronState r2 = reset_neuron(r1, p);
        if (!latch || r1.fired || r1.position != p.track_width_neuron ||
            r2.position != r1.position || r2.fired != r1.fired) {
            ok = false;
            detail = "latch or reset misbehaved";
        }
    }

    report(1, "device property suite", ok, detail);
}

// ---------------------------------------------------------------- criterion 2

void criterion_oracle_equivalence() {
    Rng rng(77001);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n_in = 1 + static_cast<int>(rng.next_below(64));
        const int n_out = 1 + static_cast<int>(rng.next_below(64));
        CrossbarLayer layer = CrossbarLayer::create(n_in, n_out, reference_params());
        for (auto& syn : layer.synapses) syn.position = rng.next_double();
        InputPattern in;
        for (int j = 0; j < n_in; ++j) {
            in.voltages.push_back(rng.next_below(2) ? VoltageLevel::Vdd : VoltageLevel::Gnd);
        }
        const auto fast = feedforward_currents(layer, in);

        // Independent oracle: column-major naive dot product.
        const auto& p = layer.params;
        for (int k = 0; k < n_out; ++k) {
            double acc = 0.0;
            for (int j = 0; j < n_in; ++j) {
                if (in.voltages[j] != VoltageLevel::Vdd) continue;
                const double x = layer.synapse(j, k).position;
                acc += ((x / p.track_width_synapse) * p.g_antiparallel +
                        ((p.track_width_synapse - x) / p.track_width_synapse) * p.g_parallel) *
                       p.v_dd;
            }
            const double scale = std::max(1.0, std::abs(acc));
            worst = std::max(worst, std::abs(fast[k] - acc) / scale);
        }
    }
    std::ostringstream detail;
    detail << "1000 layers <= 64x64, worst relative error " << worst;
    report(2, "feed-forward oracle equivalence", worst <= 1e-12, detail.str());
}

// ---------------------------------------------------------------- criterion 3

void criterion_convergence() {
    // Fire threshold at the initial-current level: the fired/non-fired
    // learning-rate gap is what lets a second column take over a pattern when
    // one column initially captures both.
    DeviceParams params;
    params.mobility_synapse = 0.4;
    params.mobility_neuron = 0.05;

    int good_seeds = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ClusterConfig cfg;
        cfg.n_clusters = 2;
        cfg.wta_mode = WtaMode::Hard;
        cfg.feedback_scope = FeedbackScope::WinnersOnly;
        cfg.unsupervised_samples = 200;
        cfg.seed = seed;
        CrossbarLayer layer = init_network(16, cfg, params);

        InputPattern a, b;
        for (int j = 0; j < 16; ++j) {
            a.voltages.push_back(j < 8 ? VoltageLevel::Vdd : VoltageLevel::Gnd);
            b.voltages.push_back(j < 8 ? VoltageLevel::Gnd : VoltageLevel::Vdd);
        }
        Dataset ds;
        ds.patterns = {a, b};
        ds.meta.n_inputs = 16;
        train_unsupervised(layer, ds, cfg);

        auto correlation = [&](int k, const InputPattern& d) {
            double acc = 0.0;
            for (int j = 0; j < 16; ++j) {
                const double w = synapse_weight(
                    synapse_conductance(layer.synapse(j, k), layer.params), layer.params);
                acc += w * (d.voltages[j] == VoltageLevel::Vdd ? 1.0 : 0.0);
            }
            return acc;
        };
        const int ka = infer_cluster(layer, a);
        const int kb = infer_cluster(layer, b);
        if (ka != kb && correlation(ka, a) > correlation(ka, b) &&
            correlation(kb, b) > correlation(kb, a)) {
            ++good_seeds;
        }
    }
    std::ostringstream detail;
    detail << good_seeds << "/10 seeds specialized after 200 presentations";
    report(3, "two-cluster convergence", good_seeds == 10, detail.str());
}

// -------------------------------------------------------- shared task running

struct TaskOutcome {
    // accuracy[seed][i] for sweep entry i; control[seed] is the sweep-mean
    // accuracy of the untrained (U = 0) system under the same seed.
    std::vector<std::vector<double>> accuracy;
    std::vector<double> control_mean;
    std::vector<int> sweep;
};

double final_accuracy(const ExperimentConfig& cfg, const TaskData& data) {
    ExperimentConfig entry = cfg;
    entry.checkpoints.clear();
    return run_pipeline(entry, data).curve.back().accuracy;
}

TaskOutcome run_task_matrix(ExperimentConfig cfg, int n_seeds) {
    TaskOutcome out;
    out.sweep = cfg.sweep_n_hl;
    for (int seed = 1; seed <= n_seeds; ++seed) {
        cfg.seed = static_cast<std::uint64_t>(seed);
        const TaskData data = load_task_data(cfg); // split depends on the seed
        std::vector<double> row;
        double control_sum = 0.0;
        for (int n_hl : out.sweep) {
            ExperimentConfig entry = cfg;
            entry.clustering.n_clusters = n_hl;
            row.push_back(final_accuracy(entry, data));

            ExperimentConfig control = entry;
            control.clustering.unsupervised_samples = 0;
            control_sum += final_accuracy(control, data);
        }
        out.accuracy.push_back(row);
        out.control_mean.push_back(control_sum / out.sweep.size());
    }
    return out;
}

ExperimentConfig load_config(const std::string& name) {
    return load_experiment_config(kSourceDir / "configs" / name);
}

const TaskOutcome& wisconsin_outcome() {
    static const TaskOutcome outcome = run_task_matrix(load_config("wisconsin.json"), 10);
    return outcome;
}

const TaskOutcome& iris_outcome() {
    static const TaskOutcome outcome = run_task_matrix(load_config("iris.json"), 10);
    return outcome;
}

// ---------------------------------------------------------------- criterion 4

fs::path mnist_dir() {
    if (const char* env = std::getenv("DWMTJ_MNIST_DIR")) return env;
    return kSourceDir / "data" / "mnist";
}

bool mnist_available() {
    const fs::path dir = mnist_dir();
    return fs::exists(dir / "train-images-idx3-ubyte") &&
           fs::exists(dir / "train-labels-idx1-ubyte") &&
           fs::exists(dir / "t10k-images-idx3-ubyte") &&
           fs::exists(dir / "t10k-labels-idx1-ubyte");
}

void criterion_mnist() {
    if (!mnist_available()) {
        report_skip(4, "MNIST learning curve",
                    "IDX files not found under " + mnist_dir().string() +
                        " (set DWMTJ_MNIST_DIR); this environment has no copy of MNIST");
        return;
    }
    ExperimentConfig cfg = load_config("mnist.json");
    const fs::path dir = mnist_dir();
    cfg.dataset.train_images = dir / "train-images-idx3-ubyte";
    cfg.dataset.train_labels = dir / "train-labels-idx1-ubyte";
    cfg.dataset.test_images = dir / "t10k-images-idx3-ubyte";
    cfg.dataset.test_labels = dir / "t10k-labels-idx1-ubyte";

    const TaskData data = load_task_data(cfg);
    const RunResult curve = run_pipeline(cfg, data);

    ExperimentConfig control = cfg;
    control.clustering.unsupervised_samples = 0;
    const double control_acc = run_pipeline(control, data).curve.back().accuracy;

    double acc_at_1000 = 0.0;
    bool all_late_points_pass = true;
    for (const auto& point : curve.curve) {
        if (point.d_presented == 1000) acc_at_1000 = point.accuracy;
        if (point.d_presented >= 1000 && point.accuracy < 0.75) all_late_points_pass = false;
    }
    const bool beats_control = acc_at_1000 >= control_acc + 0.05;

    std::ostringstream detail;
    detail << "accuracy(D=1000) = " << acc_at_1000 << ", control = " << control_acc
           << ", all D>=1000 points >= 0.75: " << (all_late_points_pass ? "yes" : "no");
    report(4, "MNIST learning curve", all_late_points_pass && beats_control, detail.str());
}

// ---------------------------------------------------------------- criterion 5

void criterion_wisconsin() {
    const TaskOutcome& out = wisconsin_outcome();
    double sum = 0.0, best = 0.0;
    int count = 0;
    for (const auto& row : out.accuracy) {
        for (double a : row) {
            sum += a;
            best = std::max(best, a);
            ++count;
        }
    }
    const double mean = sum / count;
    std::ostringstream detail;
    detail << "mean over sweep x 10 seeds = " << mean << " (target >= 0.93), best = " << best
           << " (target >= 0.96)";
    report(5, "Wisconsin soft-WTA sweep", mean >= 0.93 && best >= 0.96, detail.str());
}

// ---------------------------------------------------------------- criterion 6

void criterion_iris() {
    const TaskOutcome& out = iris_outcome();
    // Average of the per-seed best across the sweep.
    double sum_best = 0.0, best = 0.0;
    for (const auto& row : out.accuracy) {
        const double row_best = *std::max_element(row.begin(), row.end());
        sum_best += row_best;
        best = std::max(best, row_best);
    }
    const double mean_best = sum_best / out.accuracy.size();
    std::ostringstream detail;
    detail << "mean of per-seed best = " << mean_best << " (target >= 0.90), best = " << best
           << " (target >= 0.94)";
    report(6, "Iris soft-WTA sweep", mean_best >= 0.90 && best >= 0.94, detail.str());
}

// ---------------------------------------------------------------- criterion 7

void criterion_controls() {
    int wisconsin_beats = 0, iris_beats = 0;
    {
        const TaskOutcome& out = wisconsin_outcome();
        for (std::size_t s = 0; s < out.accuracy.size(); ++s) {
            double mean = 0.0;
            for (double a : out.accuracy[s]) mean += a;
            mean /= out.accuracy[s].size();
            if (mean > out.control_mean[s]) ++wisconsin_beats;
        }
    }
    {
        const TaskOutcome& out = iris_outcome();
        for (std::size_t s = 0; s < out.accuracy.size(); ++s) {
            double mean = 0.0;
            for (double a : out.accuracy[s]) mean += a;
            mean /= out.accuracy[s].size();
            if (mean > out.control_mean[s]) ++iris_beats;
        }
    }
    std::ostringstream detail;
    detail << "clustered > random-weights control: Wisconsin " << wisconsin_beats
           << "/10 seeds, Iris " << iris_beats << "/10 seeds (need >= 8 on both)";
    report(7, "random-weights controls", wisconsin_beats >= 8 && iris_beats >= 8, detail.str());
}

// ---------------------------------------------------------------- criterion 8

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_determinism() {
    ExperimentConfig cfg = load_config("iris.json");
    cfg.sweep_n_hl.clear();
    cfg.clustering.n_clusters = 40;
    cfg.seed = 4242;

    const fs::path base = fs::temp_directory_path() / "dwmtj_acceptance_determinism";
    fs::remove_all(base);
    cfg.output_dir = base / "a";
    run_experiment(cfg);
    cfg.output_dir = base / "b";
    run_experiment(cfg);

    const std::string a = slurp(base / "a" / "metrics.csv");
    const std::string b = slurp(base / "b" / "metrics.csv");
    const bool ok = !a.empty() && a == b;
    report(8, "seeded determinism", ok,
           ok ? "two runs of the same config are byte-identical"
              : "metrics.csv differs between identical runs");
}

} // namespace

int main(int argc, char** argv) {
    const int which = argc > 1 ? std::atoi(argv[1]) : 0;
    auto want = [&](int n) { return which == 0 || which == n; };

    if (want(1)) criterion_device_properties();
    if (want(2)) criterion_oracle_equivalence();
    if (want(3)) criterion_convergence();
    if (want(4)) criterion_mnist();
    if (want(5)) criterion_wisconsin();
    if (want(6)) criterion_iris();
    if (want(7)) criterion_controls();
    if (want(8)) criterion_determinism();

    if (g_failures > 0) return 1;
    if (g_skipped && which == 4) return 77;
    return 0;
}
