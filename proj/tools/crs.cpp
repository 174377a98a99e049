// Command-line front end for the concealing-restoring pipeline: key
// generation, conceal/restore for bit words and PGM images, and the
// statistical harness (trials, attacks, parameter sweeps) with CSV output.
//
// Exit codes: 0 success, 2 usage error, 3 format error, 4 key/data mismatch.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "crs/bitcodec.hpp"
#include "crs/conceal.hpp"
#include "crs/errors.hpp"
#include "crs/eval.hpp"
#include "crs/imagepipe.hpp"
#include "crs/keys.hpp"
#include "crs/restore.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw crs::format_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw crs::format_error("cannot write " + path);
    out << content;
}

crs::BitWord parse_bits_file(const std::string& text) {
    crs::BitWord word;
    for (char c : text) {
        if (c == '0' || c == '1')
            word.bits.push_back(static_cast<std::uint8_t>(c - '0'));
        else if (c == '\n' || c == '\r' || c == ' ' || c == '\t')
            continue;
        else
            throw crs::format_error("bit file: invalid character");
    }
    if (word.size() < 2) throw crs::format_error("bit file: needs at least 2 bits");
    return word;
}

crs::AttackKind parse_attack_kind(std::string name) {
    for (auto& c : name)
        if (c == '-') c = '_';
    if (name == "wrong_b") return crs::AttackKind::wrong_b;
    if (name == "wrong_bu") return crs::AttackKind::wrong_bu;
    if (name == "guessed_v") return crs::AttackKind::guessed_v;
    if (name == "no_nonlinearity") return crs::AttackKind::no_nonlinearity;
    if (name == "external_noise") return crs::AttackKind::external_noise;
    throw std::invalid_argument("unknown attack kind: " + name);
}

crs::SweepParam parse_sweep_param(const std::string& name) {
    if (name == "A" || name == "a") return crs::SweepParam::a;
    if (name == "b") return crs::SweepParam::b;
    if (name == "b_u" || name == "bu") return crs::SweepParam::b_u;
    throw std::invalid_argument("unknown sweep parameter: " + name);
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        grid.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument("bad grid value: " + item);
    }
    if (grid.empty()) throw std::invalid_argument("empty sweep grid");
    return grid;
}

// Shared key-source flags: either --key FILE or keygen parameters.
struct KeySource {
    std::string key_path;
    int levels = 2;
    std::string nonlinear = "none";
    std::uint64_t key_seed = 1;
    crs::LevelKeys tpl;
    double v_thd = 0.5;

    void add_flags(CLI::App* cmd, bool with_path = true) {
        if (with_path)
            cmd->add_option("--key", key_path, "key file (crskeys v1); overrides key flags");
        cmd->add_option("--levels", levels, "number of cascade levels");
        cmd->add_option("--nonlinear", nonlinear, "bijection id: g_s, g_c, g_ss or none");
        cmd->add_option("--key-seed", key_seed, "seed for key generation");
        cmd->add_option("--a", tpl.a, "drift parameter");
        cmd->add_option("--b", tpl.b, "key-stream gain");
        cmd->add_option("--bu", tpl.b_u, "concealed-data gain");
        cmd->add_option("--sigma1", tpl.w1.std_dev, "drive-noise std");
        cmd->add_option("--sigma2", tpl.w2.std_dev, "coupling-noise std");
        cmd->add_option("--sigma-v", tpl.sigma_v, "key-stream source std");
        cmd->add_option("--vthd", v_thd, "decode threshold");
    }

    crs::KeyBundle resolve() const {
        if (!key_path.empty()) return crs::deserialize_keys(read_file(key_path));
        return crs::keygen(levels, key_seed, nonlinear, tpl, v_thd);
    }
};

int run(int argc, char** argv) {
    CLI::App app{"conceal/restore pipeline for physical-layer bit words"};
    app.require_subcommand(1);

    // keygen
    auto* keygen_cmd = app.add_subcommand("keygen", "generate and write a key file");
    KeySource keygen_src;
    keygen_src.add_flags(keygen_cmd, false);
    std::uint64_t keygen_seed = 1;
    std::string keygen_out;
    keygen_cmd->add_option("--seed", keygen_seed, "seed for key generation");
    keygen_cmd->add_option("--out", keygen_out, "output key file")->required();

    // conceal
    auto* conceal_cmd = app.add_subcommand("conceal", "conceal a bit word or PGM image");
    std::string conceal_key, conceal_in, conceal_format = "bits", conceal_out;
    std::uint64_t conceal_trial_seed = 0;
    conceal_cmd->add_option("--key", conceal_key, "key file")->required();
    conceal_cmd->add_option("--in", conceal_in, "input file")->required();
    conceal_cmd->add_option("--format", conceal_format, "input format: bits or pgm");
    conceal_cmd->add_option("--trial-seed", conceal_trial_seed, "seed for the noise tape");
    conceal_cmd->add_option("--out", conceal_out, "output crsdata file")->required();

    // restore
    auto* restore_cmd = app.add_subcommand("restore", "restore a concealed-data file");
    std::string restore_key, restore_in, restore_bits, restore_csv, restore_pgm;
    int restore_w = 0, restore_h = 0;
    restore_cmd->add_option("--key", restore_key, "key file")->required();
    restore_cmd->add_option("--in", restore_in, "crsdata file")->required();
    restore_cmd->add_option("--out-bits", restore_bits, "write the restored word here");
    restore_cmd->add_option("--out-csv", restore_csv, "write the restored signal as CSV");
    restore_cmd->add_option("--out-pgm", restore_pgm, "write the restored image here");
    restore_cmd->add_option("--width", restore_w, "image width for --out-pgm");
    restore_cmd->add_option("--height", restore_h, "image height for --out-pgm");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "honest multi-trial error statistics");
    KeySource eval_src;
    eval_src.add_flags(eval_cmd);
    int eval_trials = 2000, eval_word_len = 1000;
    std::uint64_t eval_seed = 0;
    std::string eval_out, eval_signal_out;
    double eval_fz_llr = 0.0, eval_fz_lhr = 0.0;
    eval_cmd->add_option("--trials", eval_trials, "number of trials");
    eval_cmd->add_option("--word-len", eval_word_len, "payload bits per word");
    eval_cmd->add_option("--seed", eval_seed, "harness base seed");
    eval_cmd->add_option("--out", eval_out, "norms CSV output path")->required();
    eval_cmd->add_option("--signal-out", eval_signal_out, "per-position signal max-dev CSV");
    eval_cmd->add_option("--fz-llr", eval_fz_llr, "forbidden-zone low bound");
    eval_cmd->add_option("--fz-lhr", eval_fz_lhr, "forbidden-zone high bound");

    // attack
    auto* attack_cmd = app.add_subcommand("attack", "attacker-scenario statistics");
    KeySource attack_src;
    attack_src.add_flags(attack_cmd);
    std::string attack_kind;
    double eve_b = 0.0, eve_bu = 0.0, sigma_eve = 0.0, sigma_ext = 0.0;
    int attack_trials = 2000, attack_word_len = 1000;
    std::uint64_t attack_seed = 0;
    std::string attack_out;
    attack_cmd
        ->add_option("--attack", attack_kind,
                     "wrong_b, wrong_bu, guessed_v, no_nonlinearity or external_noise")
        ->required();
    attack_cmd->add_option("--eve-b", eve_b, "attacker's key-stream gain");
    attack_cmd->add_option("--eve-bu", eve_bu, "attacker's data gain");
    attack_cmd->add_option("--sigma-eve", sigma_eve, "attacker's guessing-noise std");
    attack_cmd->add_option("--sigma-ext", sigma_ext, "injected channel-noise std");
    attack_cmd->add_option("--trials", attack_trials, "number of trials");
    attack_cmd->add_option("--word-len", attack_word_len, "payload bits per word");
    attack_cmd->add_option("--seed", attack_seed, "harness base seed");
    attack_cmd->add_option("--out", attack_out, "norms CSV output path")->required();

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "single-run norms over a parameter grid");
    KeySource sweep_src;
    sweep_src.add_flags(sweep_cmd);
    std::string sweep_param, sweep_values, sweep_out;
    int sweep_word_len = 1000;
    std::uint64_t sweep_seed = 0;
    sweep_cmd->add_option("--param", sweep_param, "A, b or b_u")->required();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated grid")->required();
    sweep_cmd->add_option("--word-len", sweep_word_len, "payload bits per word");
    sweep_cmd->add_option("--seed", sweep_seed, "harness base seed");
    sweep_cmd->add_option("--out", sweep_out, "sweep CSV output path")->required();

    // image-conceal / image-restore
    auto* iconceal_cmd = app.add_subcommand("image-conceal", "conceal a PGM image");
    std::string ic_key, ic_in, ic_out;
    std::uint64_t ic_trial_seed = 0;
    iconceal_cmd->add_option("--key", ic_key, "key file")->required();
    iconceal_cmd->add_option("--in", ic_in, "input PGM (P5, maxval 255)")->required();
    iconceal_cmd->add_option("--trial-seed", ic_trial_seed, "seed for the noise tape");
    iconceal_cmd->add_option("--out", ic_out, "output crsdata file")->required();

    auto* irestore_cmd = app.add_subcommand("image-restore", "restore a concealed image");
    std::string ir_key, ir_in, ir_out, ir_compare;
    int ir_w = 0, ir_h = 0;
    irestore_cmd->add_option("--key", ir_key, "key file")->required();
    irestore_cmd->add_option("--in", ir_in, "crsdata file")->required();
    irestore_cmd->add_option("--width", ir_w, "image width")->required();
    irestore_cmd->add_option("--height", ir_h, "image height")->required();
    irestore_cmd->add_option("--out", ir_out, "output PGM path")->required();
    irestore_cmd->add_option("--compare", ir_compare,
                             "original PGM; report the payload bit-error count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    if (app.got_subcommand(keygen_cmd)) {
        keygen_src.key_seed = keygen_seed;
        write_file(keygen_out, crs::serialize_keys(keygen_src.resolve()));
        return 0;
    }

    if (app.got_subcommand(conceal_cmd) || app.got_subcommand(iconceal_cmd)) {
        const bool image = app.got_subcommand(iconceal_cmd) || conceal_format == "pgm";
        if (!image && conceal_format != "bits")
            throw std::invalid_argument("unknown --format: " + conceal_format);
        const std::string key_path = app.got_subcommand(iconceal_cmd) ? ic_key : conceal_key;
        const std::string in_path = app.got_subcommand(iconceal_cmd) ? ic_in : conceal_in;
        const std::string out_path = app.got_subcommand(iconceal_cmd) ? ic_out : conceal_out;
        const std::uint64_t trial =
            app.got_subcommand(iconceal_cmd) ? ic_trial_seed : conceal_trial_seed;

        const crs::KeyBundle kb = crs::deserialize_keys(read_file(key_path));
        const std::string input = read_file(in_path);
        const crs::BitWord word =
            image ? crs::image_to_word(crs::read_pgm(input)) : parse_bits_file(input);
        const crs::Signal pulse = crs::dae(word);
        const crs::NoiseTape tape = crs::generate_noise_tape(kb, pulse.size(), trial);
        write_file(out_path, crs::write_concealed(crs::conceal(pulse, kb, tape)));
        return 0;
    }

    if (app.got_subcommand(restore_cmd)) {
        const crs::KeyBundle kb = crs::deserialize_keys(read_file(restore_key));
        const crs::ConcealedBundle data = crs::read_concealed(read_file(restore_in));
        const crs::Restoration rest = crs::restore(data, kb);
        if (!restore_bits.empty()) write_file(restore_bits, rest.word.to_string() + "\n");
        if (!restore_csv.empty()) {
            std::string csv;
            char buf[64];
            for (double s : rest.signal) {
                std::snprintf(buf, sizeof(buf), "%.17g\n", s);
                csv += buf;
            }
            write_file(restore_csv, csv);
        }
        if (!restore_pgm.empty()) {
            if (restore_w < 1 || restore_h < 1)
                throw std::invalid_argument("--out-pgm needs --width and --height");
            write_file(restore_pgm,
                       crs::write_pgm(crs::word_to_image(rest.word, restore_w, restore_h)));
        }
        if (restore_bits.empty() && restore_csv.empty() && restore_pgm.empty())
            std::cout << rest.word.to_string() << "\n";
        return 0;
    }

    if (app.got_subcommand(eval_cmd)) {
        const crs::KeyBundle kb = eval_src.resolve();
        std::optional<crs::LogicLevels> fz;
        if (eval_fz_llr != 0.0 || eval_fz_lhr != 0.0)
            fz = crs::LogicLevels{eval_fz_llr, eval_fz_lhr};
        const crs::TrialReport report = crs::run_trials(
            kb, std::nullopt, crs::TrialConfig{eval_trials, eval_word_len, eval_seed}, fz);
        write_file(eval_out, crs::position_norms_csv(report.norms));
        if (!eval_signal_out.empty())
            write_file(eval_signal_out, crs::signal_norms_csv(report.signal_max));
        return 0;
    }

    if (app.got_subcommand(attack_cmd)) {
        const crs::KeyBundle kb = attack_src.resolve();
        crs::AttackScenario scenario;
        scenario.kind = parse_attack_kind(attack_kind);
        scenario.eve_b = eve_b;
        scenario.eve_bu = eve_bu;
        scenario.sigma_eve = sigma_eve;
        scenario.sigma_ext = sigma_ext;
        const crs::TrialReport report = crs::run_trials(
            kb, scenario, crs::TrialConfig{attack_trials, attack_word_len, attack_seed});
        write_file(attack_out, crs::position_norms_csv(report.norms));
        return 0;
    }

    if (app.got_subcommand(sweep_cmd)) {
        const crs::KeyBundle kb = sweep_src.resolve();
        const auto rows = crs::sweep(parse_sweep_param(sweep_param), parse_grid(sweep_values),
                                     kb, sweep_word_len, sweep_seed);
        write_file(sweep_out, crs::sweep_csv(rows));
        return 0;
    }

    if (app.got_subcommand(irestore_cmd)) {
        const crs::KeyBundle kb = crs::deserialize_keys(read_file(ir_key));
        const crs::ConcealedBundle data = crs::read_concealed(read_file(ir_in));
        const crs::Restoration rest = crs::restore(data, kb);
        const crs::GrayImage img = crs::word_to_image(rest.word, ir_w, ir_h);
        write_file(ir_out, crs::write_pgm(img));
        if (!ir_compare.empty()) {
            const crs::BitWord original = crs::image_to_word(crs::read_pgm(read_file(ir_compare)));
            if (original.size() != rest.word.size())
                throw crs::mismatch_error("--compare image does not match the word length");
            std::size_t flips = 0;
            for (std::size_t k = 1; k < original.size(); ++k)
                flips += original.bits[k] != rest.word.bits[k];
            std::cout << "bit_errors=" << flips << "\n";
        }
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const crs::mismatch_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const crs::format_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
