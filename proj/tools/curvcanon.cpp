// curvcanon: canonical-metric computations on explicit algebraic curves.

#include <CLI11.hpp>

#include "curvcanon/cli.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"canonical-metric computations on explicit algebraic curves"};
    app.require_subcommand(1);

    curvcanon::RunConfig cfg;
    std::string format;
    std::string grid;
    std::string point;

    auto add_common = [&](CLI::App* sub, curvcanon::Command cmd) {
        sub->add_option("--curve", cfg.curve_file, "curve spec file (JSON)")->required();
        sub->add_option("--seed", cfg.seed, "RNG seed for sampled runs");
        sub->add_option("--quad-target-rel", cfg.quad_target_rel, "Gram quadrature relative target");
        sub->add_option("--quad-max-level", cfg.quad_max_level, "maximum quadrature refinement level");
        sub->add_option("--quad-far-radius", cfg.quad_far_radius, "far-field cutoff radius (0 = automatic)");
        sub->add_option("--tol-theta", cfg.tol_theta, "nonpositivity slack for curvature checks");
        sub->add_option("--output", cfg.output, "output file (default stdout)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->callback([&, cmd]() { cfg.command = cmd; });
        return sub;
    };
    auto add_grid = [&](CLI::App* sub) { sub->add_option("--grid", grid, "scan grid as NXxNY (default 200x200)"); };

    add_common(app.add_subcommand("info", "echo the validated curve data"), curvcanon::Command::info);
    add_common(app.add_subcommand("gram", "L2 Gram matrix and orthonormalizer"), curvcanon::Command::gram);

    auto* curv = add_common(app.add_subcommand("curvature", "curvature summary or one-point sample"),
                            curvcanon::Command::curvature);
    add_grid(curv);
    curv->add_option("--point", point, "evaluate at x = re,im instead of the grid");
    curv->add_option("--sheet", cfg.point_sheet, "sheet index at --point (default 0)");

    add_grid(add_common(app.add_subcommand("scan", "full curvature scan (CSV rows)"), curvcanon::Command::scan));
    add_grid(add_common(app.add_subcommand("weierstrass", "degenerate-locus clusters"),
                        curvcanon::Command::weierstrass));

    auto* gb = add_common(app.add_subcommand("gauss-bonnet", "total-curvature consistency check"),
                          curvcanon::Command::gauss_bonnet);
    gb->add_option("--tol-gb", cfg.tol_gb, "relative tolerance on the total curvature");

    auto* sp = add_common(app.add_subcommand("symprod", "two-path metric agreement on random divisors"),
                          curvcanon::Command::symprod);
    sp->add_option("--d", cfg.d, "divisor degree");
    sp->add_option("--trials", cfg.trials, "number of random divisors");
    sp->add_option("--tol-agree", cfg.tol_agree, "metric agreement tolerance");

    CLI11_PARSE(app, argc, argv);

    if (!format.empty()) {
        cfg.format = format == "csv" ? curvcanon::OutputFormat::csv : curvcanon::OutputFormat::json;
        cfg.format_set = true;
    } else if (cfg.command == curvcanon::Command::scan || cfg.command == curvcanon::Command::weierstrass) {
        cfg.format = curvcanon::OutputFormat::csv;
    }
    if (!grid.empty()) {
        auto xpos = grid.find('x');
        bool ok = xpos != std::string::npos;
        if (ok) {
            try {
                cfg.grid_nx = std::stoi(grid.substr(0, xpos));
                cfg.grid_ny = std::stoi(grid.substr(xpos + 1));
            } catch (const std::exception&) {
                ok = false;
            }
        }
        if (!ok || cfg.grid_nx < 1 || cfg.grid_ny < 1) {
            std::cerr << "ParseError: --grid wants NXxNY, e.g. 200x200\n";
            return 1;
        }
    }
    if (!point.empty()) {
        auto comma = point.find(',');
        try {
            double re = std::stod(point.substr(0, comma));
            double im = comma == std::string::npos ? 0.0 : std::stod(point.substr(comma + 1));
            cfg.point_x = curvcanon::cplx(re, im);
        } catch (const std::exception&) {
            std::cerr << "ParseError: --point wants re,im\n";
            return 1;
        }
    }

    return curvcanon::run(cfg);
}
