#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sgb/bench.hpp"
#include "sgb/csv.hpp"
#include "sgb/distance.hpp"
#include "sgb/engine.hpp"
#include "sgb/oracle.hpp"
#include "sgb/queryfront.hpp"
#include "sgb/report.hpp"

namespace {

using namespace sgb;

constexpr int kExitOk = 0;
constexpr int kExitCsv = 1;        // unreadable / malformed input
constexpr int kExitQuery = 2;      // parse or semantic error
constexpr int kExitInternal = 3;   // invariant violation
constexpr int kExitCheckFail = 4;  // order-independence check failed

struct CommonOpts {
    std::string input;
    std::string query;
    std::vector<std::string> columns;
    std::string metric = "l2";
    double eps = 0.0;
    std::string overlap = "duplicate";
    std::string output = "json";
    bool no_index = false;
    bool no_bounds = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_output) {
    cmd->add_option("--input", o.input, "input CSV file (header row required)")
        ->required();
    cmd->add_option("--query", o.query, "query text; see README for grammar");
    cmd->add_option("--columns", o.columns,
                    "grouping columns for direct mode, comma separated")
        ->delimiter(',');
    cmd->add_option("--metric", o.metric, "distance metric for direct mode")
        ->check(CLI::IsMember({"l2", "linf"}));
    cmd->add_option("--eps", o.eps, "similarity threshold for direct mode");
    cmd->add_option("--on-overlap", o.overlap, "overlap policy for direct mode")
        ->check(CLI::IsMember({"duplicate", "eliminate", "new-group"}));
    if (with_output)
        cmd->add_option("--output", o.output, "output format")
            ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_flag("--no-index", o.no_index, "disable the group-bound index");
    cmd->add_flag("--no-bounds", o.no_bounds,
                  "disable group bounds entirely (all-pairs scans)");
}

EngineConfig config_of(const CommonOpts& o) {
    return EngineConfig{!o.no_index, !o.no_bounds};
}

struct Job {
    query::Table table;
    Dataset dataset;  // projected (and, in query mode, filtered)
    SimilaritySpec spec;
    Policy policy = Policy::Duplicate;
    bool query_mode = false;
    query::QueryAst ast;  // query mode only
};

Job prepare(const CommonOpts& o) {
    Job job;
    job.table = read_csv_file(o.input);
    const bool direct = !o.columns.empty() || o.eps > 0.0;
    if (o.query.empty() == !direct)
        throw query::SemanticError(
            "provide exactly one of --query or --columns/--eps");
    if (!o.query.empty()) {
        job.query_mode = true;
        job.ast = query::parse(o.query);
        job.spec = SimilaritySpec{job.ast.metric, job.ast.eps};
        job.policy = job.ast.overlap;
        job.dataset = query::query_dataset(job.ast, job.table);
    } else {
        if (o.columns.empty())
            throw query::SemanticError("direct mode requires --columns");
        if (!(o.eps > 0.0))
            throw query::SemanticError("direct mode requires --eps > 0");
        job.spec = SimilaritySpec{parse_metric(o.metric), o.eps};
        job.policy = parse_policy(o.overlap);
        job.dataset = query::dataset_from(job.table, o.columns);
    }
    return job;
}

int cmd_run(const CommonOpts& o) {
    const Job job = prepare(o);
    if (job.query_mode) {
        const query::ResultTable rt =
            query::execute(job.ast, job.table, config_of(o));
        if (o.output == "json")
            std::cout << report::result_json(rt, job.policy).dump(2) << "\n";
        else
            std::cout << report::result_csv(rt);
    } else {
        const GroupSet gs = run(job.dataset, job.spec, job.policy, config_of(o));
        if (o.output == "json")
            std::cout << report::group_set_json(gs).dump(2) << "\n";
        else
            std::cout << report::groups_csv(gs);
    }
    return kExitOk;
}

int cmd_oracle(const CommonOpts& o) {
    const Job job = prepare(o);
    if (job.dataset.size() > 500) {
        std::cerr << "oracle mode is limited to 500 tuples (naive clique "
                     "enumeration)\n";
        return kExitQuery;
    }
    const GroupSet gs = oracle::oracle_run(job.dataset, job.spec, job.policy);
    if (o.output == "json")
        std::cout << report::group_set_json(gs).dump(2) << "\n";
    else
        std::cout << report::groups_csv(gs);
    return kExitOk;
}

void print_witness(const oracle::PermutationWitness& w) {
    auto order_text = [](const std::vector<TupleId>& order) {
        std::string s;
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (i) s += ' ';
            s += std::to_string(order[i]);
        }
        return s;
    };
    std::cout << "witness order A: " << order_text(w.order_a) << "\n";
    std::cout << "witness order B: " << order_text(w.order_b) << "\n";
    std::cout << "output A: " << report::group_set_json(w.output_a).dump()
              << "\n";
    std::cout << "output B: " << report::group_set_json(w.output_b).dump()
              << "\n";
}

int cmd_check(const CommonOpts& o, std::size_t permutations,
              std::uint64_t seed, bool exhaustive, bool selftest_bug) {
    const Job job = prepare(o);

    oracle::Runner runner = oracle::engine_runner(config_of(o));
    if (selftest_bug) {
        // order-sensitive greedy partition used to validate the harness
        runner = [](const Dataset& d, const SimilaritySpec& s, Policy) {
            GroupSet out;
            std::vector<std::vector<const Tuple*>> groups;
            for (const Tuple& t : d.tuples) {
                bool placed = false;
                for (auto& g : groups) {
                    bool ok = true;
                    for (const Tuple* m : g)
                        if (!is_similar(s, m->point, t.point)) {
                            ok = false;
                            break;
                        }
                    if (ok) {
                        g.push_back(&t);
                        placed = true;
                        break;
                    }
                }
                if (!placed) groups.push_back({&t});
            }
            for (const auto& g : groups) {
                std::vector<TupleId> ids;
                for (const Tuple* m : g) ids.push_back(m->id);
                out.groups.push_back(std::move(ids));
            }
            return out;
        };
    }

    oracle::PermutationVerdict verdict;
    if (exhaustive) {
        if (job.dataset.size() > 8) {
            std::cerr << "--exhaustive is limited to 8 tuples (n! orders)\n";
            return kExitQuery;
        }
        verdict = oracle::exhaustive_permutation_check(job.dataset, job.spec,
                                                       job.policy, runner);
    } else {
        verdict = oracle::permutation_check(job.dataset, job.spec, job.policy,
                                            permutations, seed, runner);
    }

    if (verdict.pass) {
        std::cout << "PASS: " << verdict.orders_checked
                  << " input orders, identical canonical output (policy "
                  << to_string(job.policy) << ", metric "
                  << to_string(job.spec.metric) << ")\n";
        return kExitOk;
    }
    std::cout << "FAIL: outputs differ across input orders\n";
    print_witness(*verdict.witness);
    return kExitCheckFail;
}

int cmd_bench(const std::vector<std::size_t>& sizes, std::size_t clusters,
              double eps, std::uint64_t seed, bool skip_all_pairs) {
    std::vector<bench::BenchRow> rows;
    for (std::size_t n : sizes) {
        bench::GenSpec spec;
        spec.n = n;
        spec.clusters = clusters;
        spec.eps = eps;
        spec.seed = seed;
        rows.push_back(bench::bench_one(spec, !skip_all_pairs));
    }
    std::cout << bench::bench_table(rows);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"similarity group-by (SGB-All) engine"};
    app.require_subcommand(1);

    CommonOpts run_opts, check_opts, oracle_opts;
    std::size_t permutations = 50;
    std::uint64_t seed = 42;
    bool exhaustive = false;
    bool selftest_bug = false;

    CLI::App* c_run = app.add_subcommand(
        "run", "execute a query or group directly and print the result");
    add_common(c_run, run_opts, true);

    CLI::App* c_check = app.add_subcommand(
        "check", "verify order-independence over shuffled input orders");
    add_common(c_check, check_opts, false);
    c_check->add_option("--permutations", permutations,
                        "number of sampled shuffles");
    c_check->add_option("--seed", seed, "shuffle seed");
    c_check->add_flag("--exhaustive", exhaustive,
                      "check every one of the n! orders (small n only)");
    c_check
        ->add_flag("--selftest-order-bug", selftest_bug,
                   "run an intentionally order-sensitive grouping")
        ->group("");  // hidden

    CLI::App* c_oracle = app.add_subcommand(
        "oracle", "print the brute-force reference grouping (small inputs)");
    add_common(c_oracle, oracle_opts, true);

    std::vector<std::size_t> sizes{1000, 2000, 4000};
    std::size_t clusters = 0;
    double bench_eps = 2.0;
    std::uint64_t bench_seed = 42;
    bool skip_all_pairs = false;
    CLI::App* c_bench =
        app.add_subcommand("bench", "time the engine on synthetic data");
    c_bench->add_option("--sizes", sizes, "dataset sizes, comma separated")
        ->delimiter(',');
    c_bench->add_option("--clusters", clusters,
                        "cluster count (0 scales with n)");
    c_bench->add_option("--eps", bench_eps, "similarity threshold");
    c_bench->add_option("--seed", bench_seed, "generator seed");
    c_bench->add_flag("--skip-all-pairs", skip_all_pairs,
                      "skip the unaccelerated timing runs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_run->parsed()) return cmd_run(run_opts);
        if (c_check->parsed())
            return cmd_check(check_opts, permutations, seed, exhaustive,
                             selftest_bug);
        if (c_oracle->parsed()) return cmd_oracle(oracle_opts);
        if (c_bench->parsed())
            return cmd_bench(sizes, clusters, bench_eps, bench_seed,
                             skip_all_pairs);
    } catch (const CsvError& e) {
        std::cerr << e.what() << "\n";
        return kExitCsv;
    } catch (const query::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitQuery;
    } catch (const query::SemanticError& e) {
        std::cerr << e.what() << "\n";
        return kExitQuery;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const InvalidInput& e) {
        std::cerr << e.what() << "\n";
        return kExitCsv;
    }
    return kExitOk;
}
