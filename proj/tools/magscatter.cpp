#include <CLI11.hpp>

#include "magscatter/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Magnetic Schroedinger scattering: Lippmann-Schwinger solves, amplitudes, Born terms"};
    app.set_version_flag("--version", magscatter::kToolVersion);
    app.require_subcommand(1);

    magscatter::RunRequest req;
    std::string quadrature;
    std::uint64_t seed = 0;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"solve", "solve for the scattered field at every (k, theta)"},
        {"amplitude", "solve and evaluate the scattering amplitude"},
        {"born", "first-order Born amplitudes and second-order backscattering terms"},
        {"compare", "full, Born and improved backscattering amplitudes side by side"},
        {"sweep", "repeat compare over an epsilon, k or resolution axis"},
        {"invert", "reconstruct q~ from backscattering amplitudes"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", req.config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", req.out_dir, "output directory")->required();
        sub->add_option("--quadrature", quadrature, "override the convolution mode")
            ->check(CLI::IsMember({"fft", "dense"}));
        sub->add_option("--seed", seed, "recorded in diagnostics; the computation is deterministic");
        sub->final_callback([&req, name = name] { req.command = name; });
    }
    CLI::App* exp = app.add_subcommand("export", "write plot-ready text from an existing result directory");
    exp->add_option("--out", req.out_dir, "result directory")->required()->check(CLI::ExistingDirectory);
    exp->add_option("--kind", req.export_kind, "amplitude_vs_angle, field_slice or sweep_curve")->required();
    exp->final_callback([&req] { req.command = "export"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : static_cast<int>(magscatter::ExitCode::validation);
    }
    if (!quadrature.empty()) req.quadrature = magscatter::quadrature_from_string(quadrature);
    for (const auto& [name, help] : commands) {
        const CLI::App* sub = app.get_subcommand(name);
        if (sub->count() && sub->get_option("--seed")->count()) req.seed = seed;
    }
    return static_cast<int>(magscatter::run(req));
}
