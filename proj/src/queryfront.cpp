#include "sgb/queryfront.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>

#include "sgb/report.hpp"

namespace sgb::query {

ParseError::ParseError(std::size_t pos, const std::string& message)
    : std::runtime_error("parse error at position " + std::to_string(pos) +
                         ": " + message),
      position(pos) {}

namespace {

enum class Tok {
    Word,
    Number,
    Comma,
    LParen,
    RParen,
    Star,
    Minus,
    Plus,
    Eq,    // =
    Ne,    // <>
    Lt,
    Le,
    Gt,
    Ge,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;      // word (original case) or number literal
    std::size_t pos = 0;   // 1-based character offset
};

struct Lexer {
    std::string_view src;
    std::size_t i = 0;

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i])))
                ++i;
            if (i >= src.size()) {
                out.push_back({Tok::End, "", i + 1});
                return out;
            }
            const std::size_t at = i + 1;
            const char c = src[i];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t j = i;
                while (j < src.size() &&
                       (std::isalnum(static_cast<unsigned char>(src[j])) ||
                        src[j] == '_'))
                    ++j;
                out.push_back({Tok::Word, std::string(src.substr(i, j - i)), at});
                i = j;
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t j = i;
                while (j < src.size() &&
                       std::isdigit(static_cast<unsigned char>(src[j])))
                    ++j;
                if (j < src.size() && src[j] == '.') {
                    ++j;
                    if (j >= src.size() ||
                        !std::isdigit(static_cast<unsigned char>(src[j])))
                        throw ParseError(at, "malformed number");
                    while (j < src.size() &&
                           std::isdigit(static_cast<unsigned char>(src[j])))
                        ++j;
                }
                out.push_back({Tok::Number, std::string(src.substr(i, j - i)), at});
                i = j;
                continue;
            }
            switch (c) {
                case ',': out.push_back({Tok::Comma, ",", at}); ++i; break;
                case '(': out.push_back({Tok::LParen, "(", at}); ++i; break;
                case ')': out.push_back({Tok::RParen, ")", at}); ++i; break;
                case '*': out.push_back({Tok::Star, "*", at}); ++i; break;
                case '-': out.push_back({Tok::Minus, "-", at}); ++i; break;
                case '+': out.push_back({Tok::Plus, "+", at}); ++i; break;
                case '=': out.push_back({Tok::Eq, "=", at}); ++i; break;
                case '<':
                    if (i + 1 < src.size() && src[i + 1] == '>') {
                        out.push_back({Tok::Ne, "<>", at});
                        i += 2;
                    } else if (i + 1 < src.size() && src[i + 1] == '=') {
                        out.push_back({Tok::Le, "<=", at});
                        i += 2;
                    } else {
                        out.push_back({Tok::Lt, "<", at});
                        ++i;
                    }
                    break;
                case '>':
                    if (i + 1 < src.size() && src[i + 1] == '=') {
                        out.push_back({Tok::Ge, ">=", at});
                        i += 2;
                    } else {
                        out.push_back({Tok::Gt, ">", at});
                        ++i;
                    }
                    break;
                default:
                    throw ParseError(at, std::string("unexpected character '") +
                                             c + "'");
            }
        }
    }
};

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return out;
}

struct Parser {
    std::vector<Token> toks;
    std::size_t at = 0;

    const Token& peek() const { return toks[at]; }
    const Token& next() { return toks[at++]; }

    bool is_word(const char* kw) const {
        return peek().kind == Tok::Word && upper(peek().text) == kw;
    }

    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = peek();
        const std::string found =
            t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(t.pos, "expected " + expected + ", found " + found);
    }

    void expect_word(const char* kw) {
        if (!is_word(kw)) fail(kw);
        next();
    }

    void expect(Tok kind, const char* name) {
        if (peek().kind != kind) fail(name);
        next();
    }

    std::string ident() {
        if (peek().kind != Tok::Word) fail("identifier");
        return next().text;
    }

    double number(bool allow_sign) {
        double sign = 1.0;
        if (allow_sign &&
            (peek().kind == Tok::Minus || peek().kind == Tok::Plus)) {
            if (next().kind == Tok::Minus) sign = -1.0;
        }
        if (peek().kind != Tok::Number) fail("number");
        const Token& t = next();
        return sign * std::strtod(t.text.c_str(), nullptr);
    }

    AggExpr aggregate() {
        if (peek().kind != Tok::Word) fail("aggregate function");
        const Token& fn = peek();
        const std::string f = upper(fn.text);
        AggExpr agg;
        if (f == "MIN")
            agg.func = AggFunc::Min;
        else if (f == "MAX")
            agg.func = AggFunc::Max;
        else if (f == "SUM")
            agg.func = AggFunc::Sum;
        else if (f == "AVG")
            agg.func = AggFunc::Avg;
        else if (f == "COUNT")
            agg.func = AggFunc::Count;
        else
            throw ParseError(fn.pos, "unknown aggregate '" + fn.text + "'");
        next();
        expect(Tok::LParen, "'('");
        if (agg.func == AggFunc::Count && peek().kind == Tok::Star) {
            next();
            agg.star = true;
        } else {
            agg.column = ident();
        }
        expect(Tok::RParen, "')'");
        return agg;
    }

    Predicate predicate() {
        Predicate p;
        p.column = ident();
        switch (peek().kind) {
            case Tok::Eq: p.op = CmpOp::Eq; break;
            case Tok::Ne: p.op = CmpOp::Ne; break;
            case Tok::Lt: p.op = CmpOp::Lt; break;
            case Tok::Le: p.op = CmpOp::Le; break;
            case Tok::Gt: p.op = CmpOp::Gt; break;
            case Tok::Ge: p.op = CmpOp::Ge; break;
            default: fail("comparison operator");
        }
        next();
        p.literal = number(true);
        return p;
    }

    QueryAst query() {
        QueryAst ast;
        expect_word("SELECT");
        ast.selects.push_back(aggregate());
        while (peek().kind == Tok::Comma) {
            next();
            ast.selects.push_back(aggregate());
        }
        expect_word("FROM");
        ast.source = ident();
        if (is_word("WHERE")) {
            next();
            ast.filter.push_back(predicate());
            while (is_word("AND")) {
                next();
                ast.filter.push_back(predicate());
            }
        }
        expect_word("GROUP");
        expect_word("BY");
        ast.group_cols.push_back(ident());
        while (peek().kind == Tok::Comma) {
            next();
            ast.group_cols.push_back(ident());
        }
        expect_word("DISTANCE");
        expect(Tok::Minus, "'-'");
        expect_word("TO");
        expect(Tok::Minus, "'-'");
        expect_word("ALL");
        if (is_word("L2")) {
            ast.metric = Metric::L2;
            next();
        } else if (is_word("LINF")) {
            ast.metric = Metric::LInf;
            next();
        } else {
            fail("L2 or LINF");
        }
        expect_word("WITHIN");
        {
            const std::size_t pos = peek().pos;
            ast.eps = number(false);
            if (!(ast.eps > 0.0))
                throw ParseError(pos, "eps must be positive");
        }
        if (is_word("ON")) {
            next();
            expect(Tok::Minus, "'-'");
            expect_word("OVERLAP");
            if (is_word("DUPLICATE")) {
                ast.overlap = Policy::Duplicate;
                next();
            } else if (is_word("ELIMINATE")) {
                ast.overlap = Policy::Eliminate;
                next();
            } else if (is_word("NEW")) {
                next();
                expect(Tok::Minus, "'-'");
                expect_word("GROUP");
                ast.overlap = Policy::NewGroup;
            } else {
                fail("DUPLICATE, ELIMINATE or NEW-GROUP");
            }
        }
        expect(Tok::End, "end of query");
        return ast;
    }
};

const char* func_name(AggFunc f) {
    switch (f) {
        case AggFunc::Min: return "min";
        case AggFunc::Max: return "max";
        case AggFunc::Sum: return "sum";
        case AggFunc::Avg: return "avg";
        case AggFunc::Count: return "count";
    }
    return "count";
}

const char* op_text(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "<>";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "=";
}

bool eval(CmpOp op, double lhs, double rhs) {
    switch (op) {
        case CmpOp::Eq: return lhs == rhs;
        case CmpOp::Ne: return lhs != rhs;
        case CmpOp::Lt: return lhs < rhs;
        case CmpOp::Le: return lhs <= rhs;
        case CmpOp::Gt: return lhs > rhs;
        case CmpOp::Ge: return lhs >= rhs;
    }
    return false;
}

}  // namespace

QueryAst parse(std::string_view text) {
    Parser parser{Lexer{text}.run()};
    return parser.query();
}

std::string label(const AggExpr& agg) {
    std::string out = func_name(agg.func);
    out += '(';
    out += agg.star ? "*" : agg.column;
    out += ')';
    return out;
}

std::string render(const QueryAst& ast) {
    std::string out = "SELECT ";
    for (std::size_t i = 0; i < ast.selects.size(); ++i) {
        if (i) out += ", ";
        out += label(ast.selects[i]);
    }
    out += " FROM " + ast.source;
    if (!ast.filter.empty()) {
        out += " WHERE ";
        for (std::size_t i = 0; i < ast.filter.size(); ++i) {
            if (i) out += " AND ";
            out += ast.filter[i].column;
            out += ' ';
            out += op_text(ast.filter[i].op);
            out += ' ';
            out += report::format_double(ast.filter[i].literal);
        }
    }
    out += " GROUP BY ";
    for (std::size_t i = 0; i < ast.group_cols.size(); ++i) {
        if (i) out += ", ";
        out += ast.group_cols[i];
    }
    out += " DISTANCE-TO-ALL ";
    out += ast.metric == Metric::L2 ? "L2" : "LINF";
    out += " WITHIN ";
    out += report::format_double(ast.eps);
    out += " ON-OVERLAP ";
    switch (ast.overlap) {
        case Policy::Duplicate: out += "DUPLICATE"; break;
        case Policy::Eliminate: out += "ELIMINATE"; break;
        case Policy::NewGroup: out += "NEW-GROUP"; break;
    }
    return out;
}

namespace {

std::size_t column_index(const Table& table, const std::string& name) {
    const auto it = std::find(table.columns.begin(), table.columns.end(), name);
    if (it == table.columns.end())
        throw SemanticError("unknown column: " + name);
    return static_cast<std::size_t>(it - table.columns.begin());
}

}  // namespace

Dataset dataset_from(const Table& table,
                     const std::vector<std::string>& group_cols) {
    if (group_cols.empty())
        throw SemanticError("at least one grouping column is required");
    std::vector<std::size_t> proj;
    proj.reserve(group_cols.size());
    for (const auto& c : group_cols) proj.push_back(column_index(table, c));

    Dataset ds;
    ds.dimension = proj.size();
    ds.attr_names = table.columns;
    ds.tuples.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        Tuple t;
        t.id = static_cast<TupleId>(r);
        t.point.reserve(proj.size());
        for (std::size_t c : proj) t.point.push_back(table.rows[r][c]);
        t.attrs = table.rows[r];
        ds.tuples.push_back(std::move(t));
    }
    return ds;
}

Dataset query_dataset(const QueryAst& ast, const Table& table) {
    // bind all referenced columns up front
    for (const auto& agg : ast.selects)
        if (!agg.star) column_index(table, agg.column);
    std::vector<std::pair<std::size_t, const Predicate*>> filter;
    for (const auto& pred : ast.filter)
        filter.emplace_back(column_index(table, pred.column), &pred);
    std::vector<std::size_t> group_idx;
    for (const auto& c : ast.group_cols)
        group_idx.push_back(column_index(table, c));

    Dataset ds;
    ds.dimension = group_idx.size();
    ds.attr_names = table.columns;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        bool keep = true;
        for (const auto& [ci, pred] : filter)
            if (!eval(pred->op, table.rows[r][ci], pred->literal)) {
                keep = false;
                break;
            }
        if (!keep) continue;
        Tuple t;
        t.id = static_cast<TupleId>(r);
        for (std::size_t c : group_idx) t.point.push_back(table.rows[r][c]);
        t.attrs = table.rows[r];
        ds.tuples.push_back(std::move(t));
    }
    return ds;
}

ResultTable execute(const QueryAst& ast, const Table& table,
                    const EngineConfig& config) {
    const Dataset ds = query_dataset(ast, table);
    const GroupSet gs =
        run(ds, SimilaritySpec{ast.metric, ast.eps}, ast.overlap, config);

    ResultTable rt;
    for (const auto& agg : ast.selects) rt.headers.push_back(label(agg));
    rt.rows.reserve(gs.groups.size());
    for (const auto& members : gs.groups) {
        std::vector<double> row;
        row.reserve(ast.selects.size());
        for (const auto& agg : ast.selects) {
            if (agg.func == AggFunc::Count) {
                row.push_back(static_cast<double>(members.size()));
                continue;
            }
            const std::size_t ci = column_index(table, agg.column);
            double acc = 0.0;
            bool first = true;
            for (TupleId m : members) {  // member ids are table row indices
                const double v = table.rows[m][ci];
                switch (agg.func) {
                    case AggFunc::Min:
                        acc = first ? v : std::min(acc, v);
                        break;
                    case AggFunc::Max:
                        acc = first ? v : std::max(acc, v);
                        break;
                    case AggFunc::Sum:
                    case AggFunc::Avg:
                        acc += v;
                        break;
                    case AggFunc::Count:
                        break;
                }
                first = false;
            }
            if (agg.func == AggFunc::Avg)
                acc /= static_cast<double>(members.size());
            row.push_back(acc);
        }
        rt.rows.push_back(std::move(row));
    }
    rt.groups = gs;
    return rt;
}

}  // namespace sgb::query
