#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sgb/engine.hpp"
#include "sgb/types.hpp"

namespace sgb::query {

// Grammar (keywords case-insensitive):
//
//   query := SELECT agg {"," agg} FROM ident [WHERE pred {AND pred}]
//            GROUP BY ident {"," ident}
//            DISTANCE-TO-ALL ("L2" | "LINF") WITHIN number
//            [ON-OVERLAP ("DUPLICATE" | "ELIMINATE" | "NEW-GROUP")]
//   agg   := ("min" | "max" | "sum" | "avg") "(" ident ")"
//          | "count" "(" ("*" | ident) ")"
//   pred  := ident ("=" | "<>" | "<" | "<=" | ">" | ">=") number
//
// ON-OVERLAP defaults to DUPLICATE when omitted.

enum class AggFunc { Min, Max, Sum, Avg, Count };

struct AggExpr {
    AggFunc func = AggFunc::Count;
    bool star = false;    // count(*) only
    std::string column;   // empty iff star

    friend bool operator==(const AggExpr&, const AggExpr&) = default;
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Predicate {
    std::string column;
    CmpOp op = CmpOp::Eq;
    double literal = 0.0;

    friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct QueryAst {
    std::vector<AggExpr> selects;
    std::string source;
    std::vector<Predicate> filter;
    std::vector<std::string> group_cols;
    Metric metric = Metric::L2;
    double eps = 0.0;
    Policy overlap = Policy::Duplicate;

    friend bool operator==(const QueryAst&, const QueryAst&) = default;
};

/// Lexical or grammatical error; position is the 1-based character offset of
/// the offending token.
struct ParseError : std::runtime_error {
    ParseError(std::size_t position, const std::string& message);
    std::size_t position;
};

/// Unknown column, non-numeric grouping column and similar binding errors.
struct SemanticError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

QueryAst parse(std::string_view text);

/// Canonical text for an AST; parse(render(ast)) == ast.
std::string render(const QueryAst& ast);

/// Label used for result headers and JSON keys, e.g. "min(x)", "count(*)".
std::string label(const AggExpr& agg);

/// A relational input table with numeric cells.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Projects the named columns of a table into an engine dataset. Tuple ids
/// are row indices; all table columns ride along as attributes.
Dataset dataset_from(const Table& table,
                     const std::vector<std::string>& group_cols);

/// Binds the query's columns, applies its filter and projects its grouping
/// columns. Tuple ids remain the original row indices, so group members in
/// engine output refer to input rows.
Dataset query_dataset(const QueryAst& ast, const Table& table);

struct ResultTable {
    std::vector<std::string> headers;           // aggregate labels
    std::vector<std::vector<double>> rows;      // one row per group
    GroupSet groups;                            // members are input row ids
};

/// Filters, groups by similarity and aggregates. Rows come out in the
/// canonical order of their groups.
ResultTable execute(const QueryAst& ast, const Table& table,
                    const EngineConfig& config = {});

}  // namespace sgb::query
