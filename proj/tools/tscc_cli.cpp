// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: dataset generation, codec training, SNR and
// compression-ratio sweeps, single-point evaluation and coded BER curves.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "tscc/baseline/chain.hpp"
#include "tscc/checkpoint.hpp"
#include "tscc/harness/config.hpp"
#include "tscc/harness/image_io.hpp"
#include "tscc/harness/sweep.hpp"
#include "tscc/jscc.hpp"
#include "tscc/metrics.hpp"
#include "tscc/snr.hpp"

namespace fs = std::filesystem;
using namespace tscc;
using namespace tscc::harness;

namespace {

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
}

// every run leaves its resolved configuration next to the outputs
void write_resolved(const ExperimentConfig& cfg, const std::string& dir) {
    fs::create_directories(dir);
    write_text((fs::path(dir) / "resolved.ini").string(), render_config(cfg));
}

ExperimentConfig load_config(const std::string& path, uint64_t seed_override,
                             bool has_seed) {
    ExperimentConfig cfg = parse_config_file(path);
    if (has_seed) {
        cfg.codec.seed = seed_override;
        cfg.seeds = {seed_override};
    }
    return cfg;
}

int cmd_gen_data(const std::string& config_path, const std::string& out_dir, int count) {
    const ExperimentConfig cfg = parse_config_file(config_path);
    const int n = count > 0 ? count : cfg.train_count;
    const auto samples = generate_dataset(cfg.scene, n);
    fs::create_directories(out_dir);
    std::ostringstream states;
    states << "index,speed,throttle,brake,steer,goal_dx,goal_dy\n";
    for (int i = 0; i < n; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "scene_%05d.ppm", i);
        save_ppm(samples[i].image, (fs::path(out_dir) / name).string());
        const auto st = samples[i].state.to_array();
        states << i;
        for (double v : st) states << ',' << v;
        states << "\n";
    }
    write_text((fs::path(out_dir) / "states.csv").string(), states.str());
    write_resolved(cfg, out_dir);
    std::cout << "wrote " << n << " scenes to " << out_dir << "\n";
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& method,
              const std::string& out_path, uint64_t seed, bool has_seed) {
    const ExperimentConfig cfg = load_config(config_path, seed, has_seed);
    const auto dataset = build_train_set(cfg);
    const auto agent = build_agent(cfg);
    const int l = cfg.scene.channels * cfg.scene.height * cfg.scene.width;

    JsccEncoder encoder(l, cfg.codec.hidden_dims, cfg.codec.latent_dim, cfg.codec.seed);
    JsccDecoder decoder(cfg.scene.channels, cfg.scene.height, cfg.scene.width,
                        cfg.codec.hidden_dims, cfg.codec.latent_dim, cfg.codec.seed + 1);

    TrainResult result;
    if (method == "tscc") {
        result = train_tscc(encoder, decoder, cfg.codec, dataset, *agent, *agent);
    } else if (method == "jscc-rec") {
        result = train_reconstruction(encoder, decoder, cfg.codec, dataset);
    } else {
        std::cerr << "train: method must be tscc or jscc-rec\n";
        return 2;
    }

    const fs::path dir = fs::path(out_path).parent_path();
    if (!dir.empty()) fs::create_directories(dir);
    save_checkpoint(encoder, decoder, cfg.codec.beta_c_rec, cfg.codec.seed, out_path);
    write_resolved(cfg, dir.empty() ? "." : dir.string());

    std::cout << "trained " << method << " for " << result.loss_history.size()
              << " steps; first/last loss " << result.loss_history.front() << " / "
              << result.loss_history.back() << "\nsaved " << out_path << "\n";
    return 0;
}

NeuralCodecs load_codecs(const ExperimentConfig& cfg) {
    NeuralCodecs codecs;
    for (const auto& m : cfg.methods) {
        if (m == "tscc") codecs.tscc = load_checkpoint(cfg.tscc_checkpoint);
        if (m == "jscc-rec") codecs.jscc_rec = load_checkpoint(cfg.jscc_rec_checkpoint);
    }
    return codecs;
}

int cmd_sweep_snr(const std::string& config_path, const std::string& out_dir, int threads,
                  uint64_t seed, bool has_seed) {
    const ExperimentConfig cfg = load_config(config_path, seed, has_seed);
    const NeuralCodecs codecs = load_codecs(cfg);
    const auto records = run_snr_sweep(cfg, codecs, threads);
    fs::create_directories(out_dir);
    emit_csv(records, (fs::path(out_dir) / "sweep_snr.csv").string());
    write_resolved(cfg, out_dir);
    std::cout << "wrote " << records.size() << " rows to " << out_dir
              << "/sweep_snr.csv\n";
    return 0;
}

int cmd_sweep_ratio(const std::string& config_path, const std::string& out_dir,
                    int threads, uint64_t seed, bool has_seed) {
    const ExperimentConfig cfg = load_config(config_path, seed, has_seed);
    const NeuralCodecs codecs = load_codecs(cfg);
    const RatioSweepResult result = run_ratio_sweep(cfg, codecs, threads);
    fs::create_directories(out_dir);
    emit_csv(result.records, (fs::path(out_dir) / "sweep_ratio.csv").string());

    std::ostringstream summary;
    summary << "fixed snr_db: " << cfg.ratio_snr_db << "\n";
    if (result.saving_valid) {
        summary << "codec ratio: " << result.tscc_ratio << "\n";
        summary << "codec task score: " << result.tscc_score << "\n";
        summary << "bandwidth saving vs cheapest digital point at equal task score: "
                << result.bandwidth_saving * 100.0 << "%\n";
    } else {
        summary << "bandwidth-saving figure unavailable (codec score zero or no "
                   "digital point reaches it)\n";
    }
    write_text((fs::path(out_dir) / "summary.txt").string(), summary.str());
    write_resolved(cfg, out_dir);
    std::cout << summary.str() << "wrote " << result.records.size() << " rows to "
              << out_dir << "/sweep_ratio.csv\n";
    return 0;
}

int cmd_eval(const std::string& config_path, const std::string& checkpoint_path,
             double snr_db, const std::string& dump_dir) {
    const ExperimentConfig cfg = parse_config_file(config_path);
    const CodecCheckpoint ck = load_checkpoint(checkpoint_path);
    const auto eval_set = build_eval_set(cfg);
    const auto agent = build_agent(cfg);

    ChannelConfig cc;
    cc.kind = cfg.channel_kind;
    cc.snr_db = snr_db;
    cc.power_budget = cfg.power;
    cc.seed = cfg.seeds.front();

    std::vector<std::pair<ActionVector, ActionVector>> actions;
    double mse = 0.0, psnr_sum = 0.0, ssim_sum = 0.0;
    const std::vector<double> eps(ck.encoder.latent_dim(), 0.0);
    for (size_t i = 0; i < eval_set.size(); ++i) {
        const auto& sample = eval_set[i];
        const auto pr = forward_pipeline(ck.encoder, ck.decoder, sample.image, cc, eps, i);
        const ActionVector a = coach_act(*agent, sample.image, sample.state);
        const ActionVector ahat = agent_act(*agent, pr.output, sample.state);
        actions.emplace_back(a, ahat);
        mse += action_mse(a, ahat);
        psnr_sum += psnr(sample.image, pr.output);
        ssim_sum += ms_ssim(sample.image, pr.output,
                            std::min(cfg.scene.height, cfg.scene.width) >= 28 ? 3 : 2);
        if (!dump_dir.empty()) {
            fs::create_directories(dump_dir);
            char name[32];
            std::snprintf(name, sizeof(name), "recv_%05zu.ppm", i);
            save_ppm(pr.output, (fs::path(dump_dir) / name).string());
        }
    }
    const double n = static_cast<double>(eval_set.size());
    std::cout << "snr_db " << snr_db << "  task_score "
              << task_score(actions, cfg.task_tolerance) << "  action_mse " << mse / n
              << "  psnr " << psnr_sum / n << "  ms_ssim " << ssim_sum / n << "\n";
    return 0;
}

int cmd_ber(const std::string& config_path, const std::string& out_dir,
            const std::string& modulation, std::vector<double> grid, size_t bits) {
    const ExperimentConfig cfg = parse_config_file(config_path);
    const auto code = baseline::LdpcCode::build(cfg.ldpc_n, cfg.ldpc_k,
                                                cfg.ldpc_column_weight, cfg.digital_seed);
    const auto constellation = baseline::QamConstellation::make(cfg.qam_order);
    const BerModulation mod =
        modulation == "qam" ? BerModulation::Qam : BerModulation::Bpsk;
    if (grid.empty()) {
        grid = mod == BerModulation::Qam
                   ? std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7, 8}
                   : std::vector<double>{0, 0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4};
    }
    const auto points = run_ber_sweep(code, mod, &constellation, grid, bits,
                                      cfg.digital_seed);

    std::ostringstream csv;
    csv << (mod == BerModulation::Qam ? "snr_db" : "ebn0_db")
        << ",ber,bler,mean_iterations,info_bits\n";
    for (const auto& p : points) {
        csv << p.grid_db << ',' << p.ber << ',' << p.bler << ',' << p.mean_iterations
            << ',' << p.info_bits << "\n";
        std::cout << (mod == BerModulation::Qam ? "snr" : "ebn0") << " " << p.grid_db
                  << " dB: ber " << p.ber << " bler " << p.bler << "\n";
    }
    fs::create_directories(out_dir);
    write_text((fs::path(out_dir) / "ber.csv").string(), csv.str());
    const auto thr = ber_threshold(points, 1e-3);
    if (thr) std::cout << "ber 1e-3 threshold: " << *thr << " dB\n";
    write_resolved(cfg, out_dir);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"task-oriented source-channel coding simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out = "out";
    int threads = 1;
    uint64_t seed = 0;
    bool has_seed = false;

    auto add_common = [&](CLI::App* cmd, bool with_threads = true) {
        cmd->add_option("--config", config_path, "experiment configuration file")
            ->required();
        cmd->add_option("--out", out, "output directory");
        if (with_threads) cmd->add_option("--threads", threads, "worker threads");
        cmd->add_option("--seed", seed, "override the experiment seed")
            ->each([&](const std::string&) { has_seed = true; });
    };

    auto* gen = app.add_subcommand("gen-data", "render a synthetic scene dataset");
    int gen_count = 0;
    add_common(gen, false);
    gen->add_option("--count", gen_count, "number of scenes (default: train_count)");

    auto* train = app.add_subcommand("train", "train a codec and save its checkpoint");
    std::string train_method = "tscc";
    std::string train_out = "tscc.ckpt";
    train->add_option("--config", config_path, "experiment configuration file")->required();
    train->add_option("--method", train_method, "tscc | jscc-rec");
    train->add_option("--out", train_out, "checkpoint path");
    train->add_option("--seed", seed, "override the training seed")
        ->each([&](const std::string&) { has_seed = true; });

    auto* snr = app.add_subcommand("sweep-snr", "evaluate every method over the SNR grid");
    add_common(snr);

    auto* ratio = app.add_subcommand("sweep-ratio",
                                     "digital quality sweep at fixed SNR vs the codec");
    add_common(ratio);

    auto* eval = app.add_subcommand("eval", "single-point evaluation of a checkpoint");
    std::string eval_ckpt;
    double eval_snr = 10.0;
    std::string dump_dir;
    eval->add_option("--config", config_path, "experiment configuration file")->required();
    eval->add_option("--checkpoint", eval_ckpt, "codec checkpoint")->required();
    eval->add_option("--snr", eval_snr, "channel SNR in dB");
    eval->add_option("--dump", dump_dir, "directory for received images");

    auto* ber = app.add_subcommand("ber", "coded BER curve of the baseline code");
    std::string ber_mod = "bpsk";
    std::vector<double> ber_grid;
    size_t ber_bits = 1000000;
    add_common(ber, false);
    ber->add_option("--mod", ber_mod, "bpsk | qam");
    ber->add_option("--grid", ber_grid, "grid points in dB");
    ber->add_option("--bits", ber_bits, "minimum info bits per point");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_data(config_path, out, gen_count);
        if (train->parsed()) {
            return cmd_train(config_path, train_method, train_out, seed, has_seed);
        }
        if (snr->parsed()) return cmd_sweep_snr(config_path, out, threads, seed, has_seed);
        if (ratio->parsed()) {
            return cmd_sweep_ratio(config_path, out, threads, seed, has_seed);
        }
        if (eval->parsed()) return cmd_eval(config_path, eval_ckpt, eval_snr, dump_dir);
        if (ber->parsed()) return cmd_ber(config_path, out, ber_mod, ber_grid, ber_bits);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
