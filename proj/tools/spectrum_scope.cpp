// Command-line front end: parses flags, runs one analysis, writes data and manifest.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "spectrum_scope/commands.hpp"

namespace {

namespace cli = spectrum_scope::cli;

void add_common(CLI::App* sub, cli::Options& o, std::string& out_path) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", out_path, "Output file (manifest goes to <out>.manifest.json); stdout if absent");
}

void add_spectrum(CLI::App* sub, cli::Options& o) {
    sub->add_option("--d", o.d, "Dimension of the one-site space");
    sub->add_option("--spectrum", o.spectrum, "Comma-separated eigenvalues, non-increasing; uniform if absent");
    sub->add_flag("--allow-unsorted", o.allow_unsorted, "Sort the spectrum into descending order instead of rejecting it");
    sub->add_flag("--normalize", o.normalize, "Rescale a spectrum that does not sum to 1");
}

bool write_file(const std::string& path, const std::string& data) {
    std::ofstream f(path, std::ios::binary);
    f << data;
    return static_cast<bool>(f);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact Young-frame spectrum estimation: distributions, decay rates and sampling"};
    app.require_subcommand(1);
    app.set_version_flag("--version", cli::tool_version);

    cli::Options o;
    std::string out_path;
    std::string manifest_path;

    auto* dist = app.add_subcommand("dist", "Exact frame distribution K_N for (d, N, spectrum)");
    add_spectrum(dist, o);
    dist->add_option("--n", o.n, "Number of copies N")->required();
    add_common(dist, o, out_path);

    auto* scan = app.add_subcommand("rate-scan", "a_N = -(1/N) ln K_N(Delta) for the sup-norm ball complement");
    add_spectrum(scan, o);
    scan->add_option("--epsilon", o.epsilon, "Ball radius");
    scan->add_option("--n-list", o.n_list, "Comma-separated copy counts")->required();
    add_common(scan, o, out_path);

    auto* sample = app.add_subcommand("sample", "RSK sampling of frame outcomes");
    add_spectrum(sample, o);
    sample->add_option("--n", o.n, "Number of copies N")->required();
    sample->add_option("--samples", o.samples, "Number of sampled frames");
    sample->add_option("--seed", o.seed, "64-bit seed");
    sample->add_option("--chains", o.chains, "Independent random streams")->check(CLI::PositiveNumber);
    add_common(sample, o, out_path);

    auto* verify = app.add_subcommand("verify", "Run the invariant suites");
    verify->add_option("--level", o.level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
    verify->add_flag("--tamper-rate", o.tamper_rate, "Test hook: perturb the rate function")->group("");
    add_common(verify, o, out_path);

    auto* legendre = app.add_subcommand("legendre", "Compare I(s) with the Legendre transform of the CGF");
    add_spectrum(legendre, o);
    legendre->add_option("--point", o.point, "The point s, comma-separated")->required();
    legendre->add_option("--max-iterations", o.max_iterations, "Newton iteration budget");
    add_common(legendre, o, out_path);

    auto* replay = app.add_subcommand("replay", "Re-run a manifest and compare output checksums");
    replay->add_option("--manifest", manifest_path, "Manifest file")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : cli::exit_code::bad_input;
    }

    const int threads = cli::thread_count();
    cli::Result res;
    if (replay->parsed()) {
        std::ifstream in(manifest_path);
        nlohmann::json manifest = nlohmann::json::parse(in, nullptr, false);
        if (manifest.is_discarded()) {
            std::cerr << "error: " << manifest_path << " is not valid JSON\n";
            return cli::exit_code::bad_input;
        }
        res = cli::replay(manifest, threads);
        std::cout << res.output;
        if (!res.error.empty()) std::cerr << "error: " << res.error << '\n';
        return res.exit;
    }

    o.command = app.get_subcommands().front()->get_name();
    res = cli::run(o, threads);
    if (res.exit != cli::exit_code::ok && res.exit != cli::exit_code::invariant_failure) {
        std::cerr << "error: " << res.error << '\n';
        return res.exit;
    }

    const std::string manifest_text = res.manifest.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << res.output;
        std::cerr << manifest_text;
    } else if (!write_file(out_path, res.output) || !write_file(out_path + ".manifest.json", manifest_text)) {
        std::cerr << "error: cannot write " << out_path << '\n';
        return cli::exit_code::bad_input;
    }
    if (!res.error.empty()) std::cerr << res.error;
    return res.exit;
}
