// Pipeline driver: ingest -> block -> index -> certify -> synthesize ->
// verify -> graphic.  Exit codes: 0 pass/certificate, 1 rejection/fail,
// 2 usage or runtime error.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "foldcert/artifacts.hpp"
#include "foldcert/conley.hpp"
#include "foldcert/field.hpp"
#include "foldcert/synthesis.hpp"
#include "foldcert/verify.hpp"

namespace fs = std::filesystem;
using namespace foldcert;

namespace {

struct CommonOpts {
    std::string samples_path;
    std::string block_path;
    std::string out_dir = ".";
    double lambda0 = 0.5;
    double tol = 1e-10;
    double spacing = 0.0;  // 0: per-face covering radius
    long seed = 0;
    std::string field_name = "fold1d";
    std::vector<double> field_params;
};

void ensure_out(const CommonOpts& o) { fs::create_directories(o.out_dir); }

std::string out_path(const CommonOpts& o, const std::string& name) {
    return (fs::path(o.out_dir) / name).string();
}

Grid make_grid(const BlockDescription& bd) {
    Grid g;
    g.phase_box = bd.box;
    g.resolution = bd.resolution;
    g.lambda_resolution = bd.lambda_resolution;
    g.validate();
    return g;
}

BlockPair build_pair(const SampledVectorField& svf, const BlockDescription& bd,
                     double spacing) {
    Grid grid = make_grid(bd);
    GridRegion region = GridRegion::full_box(grid);
    IsolatingBlock block =
        classify_boundary(svf, region, spacing, TangencyPolicy::Forbid);
    return split_simple_block(svf, block, bd.split_axis, bd.split_coordinate, spacing);
}

int cmd_gen(const CommonOpts& o, const std::string& which) {
    ensure_out(o);
    if (which == "1d") {
        Field f = make_field("fold1d", {0.5});
        Box box{{{-1.0, 1.0}}};
        Vec b(1);
        b[0] = 0.0;
        auto svf = sample_block_data(f, box, 2.5, 1, 41, 41, b);
        write_text_file(out_path(o, "samples_1d.txt"), serialize_samples(svf));
        write_text_file(out_path(o, "block_1d.txt"),
                        "box= -1 1\nsplit= 0 0\npoint= 0\nresolution= 16\n"
                        "lambda_resolution= 16\n");
        std::cout << "wrote samples_1d.txt, block_1d.txt\n";
    } else if (which == "2d") {
        Field f = make_field("fold2d", {0.5, 1.0});
        Box box{{{-1.0, 1.0}, {-1.0, 1.0}}};
        Vec b(2);
        b << 0.0, 0.0;
        auto svf = sample_block_data(f, box, 2.5, 17, 17, 17, b);
        write_text_file(out_path(o, "samples_2d.txt"), serialize_samples(svf));
        write_text_file(out_path(o, "block_2d.txt"),
                        "box= -1 1 -1 1\nsplit= 0 0\npoint= 0 0\nresolution= 12 12\n"
                        "lambda_resolution= 8\n");
        std::cout << "wrote samples_2d.txt, block_2d.txt\n";
    } else {
        throw ConfigInvalid("unknown demo case: " + which + " (use 1d or 2d)");
    }
    return 0;
}

int cmd_ingest(const CommonOpts& o) {
    ensure_out(o);
    auto svf = load_samples(o.samples_path);
    auto bd = parse_block_description(read_text_file(o.block_path), svf.dim);
    BlockSpec spec;
    spec.box = bd.box;
    spec.interior_point = bd.interior_point;
    spec.split_axis = bd.split_axis;
    auto rep = check_block_assumptions(svf, spec, o.spacing);
    write_text_file(out_path(o, "assumptions.txt"), write_assumption_report(rep));
    std::cout << (rep.certified ? "Certified" : "NotCertified: " + rep.first_failure)
              << "\n";
    return rep.certified ? 0 : 1;
}

int cmd_block(const CommonOpts& o) {
    ensure_out(o);
    auto svf = load_samples(o.samples_path);
    auto bd = parse_block_description(read_text_file(o.block_path), svf.dim);
    try {
        BlockPair pair = build_pair(svf, bd, o.spacing);
        write_text_file(out_path(o, "block.txt"), write_block_pair(pair));
        std::cout << "block certified: " << pair.parent.faces.size()
                  << " parent faces\n";
        return 0;
    } catch (const NotABlock& e) {
        std::cout << "NotABlock: " << e.what() << "\n";
        return 1;
    } catch (const BadInterface& e) {
        std::cout << "BadInterface: " << e.what() << "\n";
        return 1;
    }
}

int cmd_index(const CommonOpts& o) {
    ensure_out(o);
    BlockPair pair = parse_block_pair(read_text_file(o.block_path));
    ConleyIndexReport rep = conley_index_report(pair);
    write_text_file(out_path(o, "conley_index.txt"), write_conley_report(rep));
    std::cout << "ch_S: " << rep.ch_S.summary() << "\n";
    std::cout << "ch_A: " << rep.ch_A.summary() << "\n";
    std::cout << "ch_A*: " << rep.ch_Astar.summary() << "\n";
    return 0;
}

int cmd_certify(const CommonOpts& o, const std::string& index_path) {
    ensure_out(o);
    BlockPair pair = parse_block_pair(read_text_file(o.block_path));
    ConleyIndexReport rep;
    if (!index_path.empty()) {
        rep = parse_conley_report(read_text_file(index_path));
    } else {
        rep = conley_index_report(pair);
    }
    SimpleBlockReport simple = validate_simple_block(pair);
    Certificate cert = certify_homological_saddle_node(rep, pair, simple);
    write_text_file(out_path(o, "certificate.txt"),
                    write_certificate(cert, rep, simple));
    if (cert.granted) {
        std::cout << "Certificate: homological saddle-node, k=" << cert.k << "\n";
        return 0;
    }
    std::cout << "Rejection: " << cert.rejection_reason << "\n";
    return 1;
}

int cmd_synthesize(const CommonOpts& o, const std::string& cert_path) {
    ensure_out(o);
    auto svf = load_samples(o.samples_path);
    BlockPair pair = parse_block_pair(read_text_file(o.block_path));
    int k = 1;
    if (!cert_path.empty()) {
        Certificate cert = parse_certificate(read_text_file(cert_path));
        if (!cert.granted) {
            std::cout << "certificate is a Rejection; not synthesizing\n";
            return 1;
        }
        k = cert.k;
    }
    Field base = make_field(o.field_name, o.field_params);
    SynthesisOptions opts;
    opts.lambda0 = o.lambda0;
    SynthesizedFamily fam = synthesize_family(base, svf, pair, k, opts);
    SynthesisChecks checks = check_family(fam);
    write_text_file(out_path(o, "family.txt"), serialize_family(fam));
    std::cout << "synthesized family: amplitude=" << fam.amplitude
              << " lambda0=" << fam.whitney.lambda0
              << " decrease_margin=" << fam.lyapunov.worst_margin
              << " sigma0_dev=" << checks.sigma0_deviation
              << " outside_dev=" << checks.outside_deviation << "\n";
    return 0;
}

int cmd_verify(const CommonOpts& o, const std::string& family_path) {
    ensure_out(o);
    SynthesizedFamily fam = parse_family(read_text_file(family_path));
    VerifyOptions vopts;
    vopts.newton.tol = o.tol;
    VerificationReport rep = verify_C1_C2_C3(fam, vopts);
    write_text_file(out_path(o, "verification.txt"), write_verification_report(rep));

    // branch export for plotting
    FieldFn h = [&fam](const Vec& x, double lambda) { return fam.eval(x, lambda, 1.0); };
    auto seeds = grid_seeds(fam.block_box, 9);
    auto eqs = find_equilibria(h, 0.0, fam.block_box, seeds);
    for (const auto& eq : eqs) {
        if (eq.unstable_dimension() != fam.unstable_dim - 1) continue;
        try {
            auto branch = continue_branch(h, {0.0, 1.0}, eq.x, 0.0);
            write_text_file(out_path(o, "branch.tsv"), write_branch_table(branch));
        } catch (const LostBranch&) {
        }
        break;
    }
    std::cout << (rep.pass ? "Pass" : "Fail") << ": lambda0_estimate="
              << rep.lambda0_estimate << " exponent=" << rep.scaling_exponent << "\n";
    if (!rep.pass) std::cout << rep.detail << "\n";
    return rep.pass ? 0 : 1;
}

int cmd_graphic(const CommonOpts& o, const std::string& family_path) {
    ensure_out(o);
    SynthesizedFamily fam = parse_family(read_text_file(family_path));
    write_text_file(out_path(o, "graphic.tsv"), graphic_table(fam.graphic));
    write_text_file(out_path(o, "graphic_events.tsv"), event_table(fam.graphic));
    write_text_file(out_path(o, "graphic.svg"), graphic_svg(fam.graphic));
    std::cout << "wrote graphic.tsv, graphic_events.tsv, graphic.svg\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certification and synthesis for sampled saddle-node dynamics"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string gen_case = "1d", index_path, cert_path, family_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", o.out_dir, "output directory");
        cmd->add_option("--lambda0", o.lambda0, "target fold parameter in (0,1)");
        cmd->add_option("--tol", o.tol, "newton tolerance");
        cmd->add_option("--seed", o.seed, "seed for randomized seeding");
        cmd->add_option("--spacing", o.spacing,
                        "covering radius override (0 = per-face estimate)");
    };

    auto* gen = app.add_subcommand("gen", "write demo sample/block files");
    gen->add_option("--case", gen_case, "1d or 2d");
    add_common(gen);

    auto* ingest = app.add_subcommand("ingest", "certify the block sign assumptions");
    ingest->add_option("--samples", o.samples_path)->required();
    ingest->add_option("--block", o.block_path)->required();
    add_common(ingest);

    auto* block = app.add_subcommand("block", "build and certify the isolating block");
    block->add_option("--samples", o.samples_path)->required();
    block->add_option("--block", o.block_path)->required();
    add_common(block);

    auto* index = app.add_subcommand("index", "compute the homology Conley indices");
    index->add_option("--block", o.block_path, "block artifact")->required();
    add_common(index);

    auto* certify = app.add_subcommand("certify", "assemble the certificate");
    certify->add_option("--block", o.block_path, "block artifact")->required();
    certify->add_option("--index", index_path, "conley index artifact (optional)");
    add_common(certify);

    auto* synth = app.add_subcommand("synthesize", "construct F(x,lambda,sigma)");
    synth->add_option("--samples", o.samples_path)->required();
    synth->add_option("--block", o.block_path, "block artifact")->required();
    synth->add_option("--certificate", cert_path, "certificate artifact (optional)");
    synth->add_option("--field", o.field_name, "reference field model name");
    synth->add_option("--field-params", o.field_params, "reference field parameters");
    add_common(synth);

    auto* verify = app.add_subcommand("verify", "verify C1-C3 for the synthesized family");
    verify->add_option("--family", family_path)->required();
    add_common(verify);

    auto* graphic = app.add_subcommand("graphic", "export the Cerf graphic");
    graphic->add_option("--family", family_path)->required();
    add_common(graphic);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (o.tol <= 0.0) throw ConfigInvalid("tolerance must be positive");
        if (gen->parsed()) return cmd_gen(o, gen_case);
        if (ingest->parsed()) return cmd_ingest(o);
        if (block->parsed()) return cmd_block(o);
        if (index->parsed()) return cmd_index(o);
        if (certify->parsed()) return cmd_certify(o, index_path);
        if (synth->parsed()) return cmd_synthesize(o, cert_path);
        if (verify->parsed()) return cmd_verify(o, family_path);
        if (graphic->parsed()) return cmd_graphic(o, family_path);
    } catch (const MissingArtifact& e) {
        std::cerr << "missing artifact: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
