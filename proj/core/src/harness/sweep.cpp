// SPDX-License-Identifier: Apache-2.0
#include "tscc/harness/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tscc/harness/image_io.hpp"
#include "tscc/jscc.hpp"
#include "tscc/metrics.hpp"
#include "tscc/rng.hpp"
#include "tscc/snr.hpp"

namespace tscc::harness {

namespace {

uint64_t hash_string(const std::string& s) {
    uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

uint64_t double_bits(double v) {
    uint64_t b;
    std::memcpy(&b, &v, 8);
    return b;
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

int ms_ssim_scales_for(int height, int width) {
    const int side = std::min(height, width);
    if (side >= 28) return 3;
    if (side >= 14) return 2;
    return 1;
}

} // namespace

// ---------------------------------------------------------------------------
// CSV

std::string render_csv(const std::vector<SweepRecord>& records) {
    std::ostringstream o;
    o << "method,snr_db,compression_ratio,task_score,action_mse,psnr,ms_ssim,"
         "failure_rate,seed\n";
    for (const auto& r : records) {
        o << csv_quote(r.method) << ',' << format_double(r.snr_db) << ','
          << format_double(r.compression_ratio) << ',' << format_double(r.task_score)
          << ',' << format_double(r.action_mse) << ',' << format_double(r.psnr) << ','
          << format_double(r.ms_ssim) << ',' << format_double(r.failure_rate) << ','
          << r.seed << "\n";
    }
    return o.str();
}

void emit_csv(const std::vector<SweepRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("emit_csv: cannot write " + path);
    const std::string body = render_csv(records);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

std::vector<SweepRecord> parse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("parse_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("parse_csv: empty file");

    auto split_fields = [](const std::string& s) {
        std::vector<std::string> fields;
        std::string cur;
        bool quoted = false;
        for (size_t i = 0; i < s.size(); ++i) {
            const char c = s[i];
            if (quoted) {
                if (c == '"' && i + 1 < s.size() && s[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    cur += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        fields.push_back(cur);
        return fields;
    };

    auto parse_num = [](const std::string& s) {
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        return std::stod(s);
    };

    std::vector<SweepRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto fields = split_fields(line);
        if (fields.size() != 9) throw std::runtime_error("parse_csv: bad row: " + line);
        SweepRecord r;
        r.method = fields[0];
        r.snr_db = parse_num(fields[1]);
        r.compression_ratio = parse_num(fields[2]);
        r.task_score = parse_num(fields[3]);
        r.action_mse = parse_num(fields[4]);
        r.psnr = parse_num(fields[5]);
        r.ms_ssim = parse_num(fields[6]);
        r.failure_rate = parse_num(fields[7]);
        r.seed = static_cast<uint64_t>(std::stoull(fields[8]));
        records.push_back(std::move(r));
    }
    return records;
}

// ---------------------------------------------------------------------------
// dataset / agent assembly

std::vector<Sample> build_train_set(const ExperimentConfig& config) {
    if (config.dataset_kind == "synthetic") {
        return generate_dataset(config.scene, config.train_count);
    }
    LoadReport report =
        load_image_dir(config.dataset_dir, config.scene.height, config.scene.width);
    std::vector<Sample> out;
    const int count = std::min<int>(config.train_count, (int)report.images.size());
    for (int i = 0; i < count; ++i) {
        Rng rng(config.scene.seed, static_cast<uint64_t>(i), 0x57A7E);
        StateVector st;
        st.speed = 0.2 + 0.7 * rng.next_double();
        st.goal_dx = rng.next_symmetric() * 0.5;
        st.goal_dy = 0.5 + 0.5 * rng.next_double();
        out.push_back(Sample{std::move(report.images[i]), st});
    }
    return out;
}

std::vector<Sample> build_eval_set(const ExperimentConfig& config) {
    if (config.dataset_kind == "synthetic") {
        SceneSpec held_out = config.scene;
        held_out.seed = stream_key({config.scene.seed, 0xE7A1});
        return generate_dataset(held_out, config.eval_count);
    }
    LoadReport report =
        load_image_dir(config.dataset_dir, config.scene.height, config.scene.width);
    std::vector<Sample> out;
    const int total = static_cast<int>(report.images.size());
    const int count = std::min(config.eval_count, total);
    for (int i = 0; i < count; ++i) {
        const int idx = total - count + i;  // tail of the directory listing
        Rng rng(config.scene.seed, static_cast<uint64_t>(idx), 0x57A7E);
        StateVector st;
        st.speed = 0.2 + 0.7 * rng.next_double();
        st.goal_dx = rng.next_symmetric() * 0.5;
        st.goal_dy = 0.5 + 0.5 * rng.next_double();
        out.push_back(Sample{std::move(report.images[idx]), st});
    }
    return out;
}

std::unique_ptr<TaskAgent> build_agent(const ExperimentConfig& config) {
    if (config.agent_kind == "structured") {
        return std::make_unique<StructuredAgent>(config.scene.channels, config.scene.height,
                                                 config.scene.width);
    }
    return std::make_unique<SurrogateAgent>(config.scene.channels, config.scene.height,
                                            config.scene.width, config.agent_hidden,
                                            config.agent_seed);
}

// ---------------------------------------------------------------------------
// one grid point

namespace {

struct PointInputs {
    const ExperimentConfig* config;
    const std::vector<Sample>* eval_set;
    const TaskAgent* agent;
    const NeuralCodecs* codecs;
    const baseline::LdpcCode* code;
    const baseline::QamConstellation* constellation;
};

SweepRecord evaluate_point(const PointInputs& in, const std::string& method,
                           double snr_db, uint64_t seed, double quality_q) {
    const ExperimentConfig& cfg = *in.config;
    const std::vector<Sample>& eval_set = *in.eval_set;
    const uint64_t method_hash = hash_string(method);
    const int scales =
        ms_ssim_scales_for(eval_set.front().image.height(), eval_set.front().image.width());

    ChannelConfig cc;
    cc.kind = cfg.channel_kind;
    cc.snr_db = snr_db;
    cc.power_budget = cfg.power;
    cc.seed = seed;

    SweepRecord rec;
    rec.method = method;
    rec.snr_db = snr_db;
    rec.seed = seed;

    std::vector<std::pair<ActionVector, ActionVector>> actions;
    double mse_sum = 0.0, psnr_sum = 0.0, ssim_sum = 0.0, ratio_sum = 0.0;
    int failures = 0;

    for (size_t i = 0; i < eval_set.size(); ++i) {
        const Sample& sample = eval_set[i];
        const uint64_t stream =
            stream_key({method_hash, double_bits(snr_db), seed, (uint64_t)i});

        ImageTensor received;
        if (method == "digital") {
            const auto result =
                baseline::run_digital_chain(sample.image, baseline::CodecQuality{quality_q},
                                            *in.code, *in.constellation, cc, stream);
            received = result.image;
            ratio_sum += result.bandwidth_ratio;
            if (result.failed) ++failures;
        } else {
            const CodecCheckpoint& ck =
                method == "tscc" ? *in.codecs->tscc : *in.codecs->jscc_rec;
            // evaluation transmits the latent mean (epsilon = 0)
            const std::vector<double> eps(ck.encoder.latent_dim(), 0.0);
            const auto result =
                forward_pipeline(ck.encoder, ck.decoder, sample.image, cc, eps, stream);
            received = result.output;
            ratio_sum += compression_ratio(ck.encoder.latent_dim() / 2, sample.image.size());
        }

        const ActionVector a = coach_act(*in.agent, sample.image, sample.state);
        const ActionVector ahat = agent_act(*in.agent, received, sample.state);
        actions.emplace_back(a, ahat);
        mse_sum += action_mse(a, ahat);
        psnr_sum += psnr(sample.image, received);
        ssim_sum += ms_ssim(sample.image, received, scales);
    }

    const double n = static_cast<double>(eval_set.size());
    rec.task_score = task_score(actions, cfg.task_tolerance);
    rec.action_mse = mse_sum / n;
    rec.psnr = psnr_sum / n;
    rec.ms_ssim = ssim_sum / n;
    rec.compression_ratio = ratio_sum / n;
    rec.failure_rate = failures / n;
    return rec;
}

struct Job {
    std::string method;
    double snr_db;
    uint64_t seed;
    double quality_q;
};

std::vector<SweepRecord> run_jobs(const PointInputs& inputs, const std::vector<Job>& jobs,
                                  int threads) {
    std::vector<SweepRecord> results(jobs.size());
    std::atomic<size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;

    auto worker = [&]() {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= jobs.size()) break;
            try {
                results[i] = evaluate_point(inputs, jobs[i].method, jobs[i].snr_db,
                                            jobs[i].seed, jobs[i].quality_q);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };

    const int nthreads = std::max(1, threads);
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return results;
}

void require_checkpoints(const ExperimentConfig& config, const NeuralCodecs& codecs) {
    for (const auto& m : config.methods) {
        if (m == "tscc" && !codecs.tscc) {
            throw std::runtime_error("sweep: missing checkpoint for method tscc");
        }
        if (m == "jscc-rec" && !codecs.jscc_rec) {
            throw std::runtime_error("sweep: missing checkpoint for method jscc-rec");
        }
    }
}

} // namespace

std::vector<SweepRecord> run_snr_sweep(const ExperimentConfig& config,
                                       const NeuralCodecs& codecs, int threads) {
    config.validate();
    require_checkpoints(config, codecs);

    const std::vector<Sample> eval_set = build_eval_set(config);
    if (eval_set.empty()) throw std::runtime_error("sweep: empty evaluation set");
    const std::unique_ptr<TaskAgent> agent = build_agent(config);

    std::optional<baseline::LdpcCode> code;
    std::optional<baseline::QamConstellation> constellation;
    const bool digital = std::find(config.methods.begin(), config.methods.end(),
                                   "digital") != config.methods.end();
    if (digital) {
        code = baseline::LdpcCode::build(config.ldpc_n, config.ldpc_k,
                                         config.ldpc_column_weight, config.digital_seed);
        constellation = baseline::QamConstellation::make(config.qam_order);
    }

    PointInputs inputs{&config, &eval_set, agent.get(), &codecs,
                       code ? &*code : nullptr,
                       constellation ? &*constellation : nullptr};

    std::vector<Job> jobs;
    for (const auto& method : config.methods) {
        for (double snr : config.snr_grid_db) {
            for (uint64_t seed : config.seeds) {
                jobs.push_back(Job{method, snr, seed, config.quality_q});
            }
        }
    }
    return run_jobs(inputs, jobs, threads);
}

RatioSweepResult run_ratio_sweep(const ExperimentConfig& config, const NeuralCodecs& codecs,
                                 int threads) {
    config.validate();
    require_checkpoints(config, codecs);

    const std::vector<Sample> eval_set = build_eval_set(config);
    if (eval_set.empty()) throw std::runtime_error("sweep: empty evaluation set");
    const std::unique_ptr<TaskAgent> agent = build_agent(config);

    const auto code = baseline::LdpcCode::build(config.ldpc_n, config.ldpc_k,
                                                config.ldpc_column_weight,
                                                config.digital_seed);
    const auto constellation = baseline::QamConstellation::make(config.qam_order);

    PointInputs inputs{&config, &eval_set, agent.get(), &codecs, &code, &constellation};

    std::vector<Job> jobs;
    for (double q : config.quality_grid) {
        jobs.push_back(Job{"digital", config.ratio_snr_db, config.seeds.front(), q});
    }
    const bool has_tscc = std::find(config.methods.begin(), config.methods.end(),
                                    "tscc") != config.methods.end();
    const bool has_rec = std::find(config.methods.begin(), config.methods.end(),
                                   "jscc-rec") != config.methods.end();
    if (has_tscc) jobs.push_back(Job{"tscc", config.ratio_snr_db, config.seeds.front(), 0.0});
    if (has_rec) {
        jobs.push_back(Job{"jscc-rec", config.ratio_snr_db, config.seeds.front(), 0.0});
    }

    RatioSweepResult result;
    result.records = run_jobs(inputs, jobs, threads);

    if (has_tscc) {
        const auto& tscc_row = result.records[config.quality_grid.size()];
        result.tscc_ratio = tscc_row.compression_ratio;
        result.tscc_score = tscc_row.task_score;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < config.quality_grid.size(); ++i) {
            const auto& row = result.records[i];
            if (row.task_score >= result.tscc_score) {
                best_ratio = std::min(best_ratio, row.compression_ratio);
            }
        }
        // a zero codec score would make the comparison vacuous
        if (result.tscc_score > 0.0 && std::isfinite(best_ratio) && best_ratio > 0.0) {
            result.bandwidth_saving = 1.0 - result.tscc_ratio / best_ratio;
            result.saving_valid = true;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// BER sweep

std::vector<BerPoint> run_ber_sweep(const baseline::LdpcCode& code, BerModulation modulation,
                                    const baseline::QamConstellation* constellation,
                                    const std::vector<double>& grid_db, size_t min_info_bits,
                                    uint64_t seed, int max_iterations) {
    if (modulation == BerModulation::Qam && constellation == nullptr) {
        throw std::invalid_argument("run_ber_sweep: QAM mode needs a constellation");
    }
    const int n = code.n();
    const int k = code.k_info();

    std::vector<BerPoint> points;
    for (size_t g = 0; g < grid_db.size(); ++g) {
        const double grid = grid_db[g];
        Rng rng(seed, 0xBE12, g);
        BerPoint point;
        point.grid_db = grid;

        size_t bit_errors = 0, block_errors = 0, blocks = 0;
        double iteration_sum = 0.0;

        std::vector<uint8_t> message(k);
        while (point.info_bits < min_info_bits) {
            for (auto& b : message) b = rng.next_double() < 0.5 ? 0 : 1;
            const auto codeword = code.encode(message);

            std::vector<double> llrs;
            if (modulation == BerModulation::Bpsk) {
                // Eb/N0 axis: unit-energy BPSK, N0 = 1 / (R * Eb/N0)
                const double ebn0 = std::pow(10.0, grid / 10.0);
                const double sigma2 = 1.0 / (2.0 * code.rate() * ebn0);
                llrs.resize(n);
                for (int i = 0; i < n; ++i) {
                    const double x = codeword[i] ? -1.0 : 1.0;
                    const double y = x + std::sqrt(sigma2) * rng.next_gaussian();
                    llrs[i] = 2.0 * y / sigma2;
                }
            } else {
                baseline::Bitstream bits;
                for (uint8_t b : codeword) bits.push_bit(b);
                const auto mod = baseline::qam_modulate(bits, *constellation);
                const double sigma2 = snr_to_noise_variance(grid, 1.0);
                std::vector<std::complex<double>> received(mod.symbols.size());
                const double comp = std::sqrt(sigma2 / 2.0);
                for (size_t i = 0; i < received.size(); ++i) {
                    received[i] = mod.symbols[i] + std::complex<double>(
                                                       comp * rng.next_gaussian(),
                                                       comp * rng.next_gaussian());
                }
                llrs = baseline::qam_demodulate_llr(received, *constellation, sigma2);
                llrs.resize(n);  // drop pad-bit LLRs
            }

            const auto res = code.decode_bp(llrs, max_iterations);
            iteration_sum += res.iterations;
            size_t errors = 0;
            for (int i = 0; i < k; ++i) {
                if (res.message[i] != message[i]) ++errors;
            }
            bit_errors += errors;
            if (errors > 0 || !res.converged) ++block_errors;
            point.info_bits += static_cast<size_t>(k);
            ++blocks;
        }

        point.ber = static_cast<double>(bit_errors) / point.info_bits;
        point.bler = static_cast<double>(block_errors) / blocks;
        point.mean_iterations = iteration_sum / blocks;
        points.push_back(point);
    }
    return points;
}

std::optional<double> ber_threshold(const std::vector<BerPoint>& points, double target_ber) {
    if (points.size() < 2) return std::nullopt;
    auto floor_ber = [](const BerPoint& p) {
        return std::max(p.ber, 0.5 / static_cast<double>(p.info_bits));
    };
    // highest grid point still above target, interpolated in log BER
    for (size_t i = points.size() - 1; i-- > 0;) {
        if (points[i].ber > target_ber) {
            const double b0 = std::log10(floor_ber(points[i]));
            const double b1 = std::log10(floor_ber(points[i + 1]));
            const double t = std::log10(target_ber);
            if (b1 >= b0) return points[i].grid_db;
            return points[i].grid_db +
                   (t - b0) * (points[i + 1].grid_db - points[i].grid_db) / (b1 - b0);
        }
    }
    return std::nullopt;
}

} // namespace tscc::harness
