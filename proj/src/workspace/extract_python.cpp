#include <optional>
#include <set>

#include "extract.hpp"

namespace agentslice::detail {

namespace {

enum class ScopeKind { module, klass, function };

struct FunctionScope {
  std::size_t record = 0;
  std::set<std::string, std::less<>> globals;  // names declared `global`/`nonlocal`
  bool is_init = false;
  std::string owner;  // qualified class for methods
};

class PythonExtractor {
 public:
  PythonExtractor(const SourceFile& file, const ts::Tree& tree)
      : file_(file), src_(tree.source()), root_(tree.root()) {}

  FileRecords run() {
    visit(root_);
    return std::move(out_);
  }

 private:
  std::string_view text(TSNode n) const { return ts::text(n, src_); }

  ScopeKind scope() const { return scopes_.empty() ? ScopeKind::module : scopes_.back(); }

  // Decorated definitions span from the first decorator.
  static TSNode outer_definition(TSNode n) {
    TSNode parent = ts_node_parent(n);
    if (ts::present(parent) && ts::type(parent) == "decorated_definition") return parent;
    return n;
  }

  void visit(TSNode n) {
    auto t = ts::type(n);
    if (t == "import_statement" || t == "import_from_statement" ||
        t == "future_import_statement") {
      out_.structurals.push_back(
          {file_.path(), {ts::first_line(n), ts::last_line(n)}, StructuralKind::import});
      return;
    }
    if (t == "class_definition") return visit_class(n);
    if (t == "function_definition") return visit_function(n);
    if (t == "lambda") return visit_lambda(n);
    if (t == "global_statement" || t == "nonlocal_statement") {
      if (!functions_.empty()) {
        for (TSNode c : ts::named_children(n)) {
          if (ts::type(c) == "identifier") functions_.back().globals.emplace(text(c));
        }
      }
      return;
    }
    if (t == "assignment" || t == "augmented_assignment") visit_assignment(n);
    for (TSNode c : ts::named_children(n)) visit(c);
  }

  void visit_class(TSNode n) {
    ClassRecord rec;
    rec.file = file_.path();
    TSNode name = ts::field(n, "name");
    rec.name = ts::present(name) ? std::string(text(name)) : "<anonymous>";
    rec.qualified_name = join_chain(chain_, rec.name);
    TSNode supers = ts::field(n, "superclasses");
    if (ts::present(supers)) {
      for (TSNode s : ts::named_children(supers)) {
        auto st = ts::type(s);
        if (st == "keyword_argument" || st == "comment") continue;
        rec.supertypes.emplace_back(text(s));
      }
    }
    TSNode outer = outer_definition(n);
    rec.span = {ts::first_line(outer), ts::last_line(outer)};
    int header_end = ts::first_line(n);
    for (TSNode c : ts::children(n)) {
      if (ts::type(c) == ":") {
        header_end = ts::first_line(c);
        break;
      }
    }
    rec.header = {rec.span.start, std::max(rec.span.start, header_end)};
    out_.structurals.push_back({file_.path(), rec.header, StructuralKind::class_header});
    class_supertypes_.push_back(rec.supertypes);
    class_names_.push_back(rec.qualified_name);
    out_.classes.push_back(rec);

    chain_.push_back(rec.name);
    scopes_.push_back(ScopeKind::klass);
    TSNode body = ts::field(n, "body");
    if (ts::present(body)) visit(body);
    scopes_.pop_back();
    chain_.pop_back();
    class_supertypes_.pop_back();
    class_names_.pop_back();
  }

  std::vector<Parameter> parameters(TSNode params, bool drop_receiver) {
    std::vector<Parameter> out;
    if (!ts::present(params)) return out;
    for (TSNode p : ts::named_children(params)) {
      auto pt = ts::type(p);
      Parameter param;
      if (pt == "identifier") {
        param.name = text(p);
      } else if (pt == "typed_parameter") {
        for (TSNode c : ts::named_children(p)) {
          auto ct = ts::type(c);
          if (ct == "identifier") {
            param.name = text(c);
            break;
          }
          if (ct == "list_splat_pattern") param.name = "*" + std::string(text(ts::named_children(c).at(0)));
          if (ct == "dictionary_splat_pattern") param.name = "**" + std::string(text(ts::named_children(c).at(0)));
          if (!param.name.empty()) break;
        }
        TSNode type = ts::field(p, "type");
        if (ts::present(type)) param.declared_type = text(type);
      } else if (pt == "default_parameter" || pt == "typed_default_parameter") {
        TSNode name = ts::field(p, "name");
        param.name = ts::present(name) ? text(name) : text(p);
        TSNode type = ts::field(p, "type");
        if (ts::present(type)) param.declared_type = text(type);
      } else if (pt == "list_splat_pattern") {
        param.name = text(p);
      } else if (pt == "dictionary_splat_pattern") {
        param.name = text(p);
      } else {
        continue;  // separators, comments
      }
      out.push_back(std::move(param));
    }
    if (drop_receiver && !out.empty() && (out.front().name == "self" || out.front().name == "cls")) {
      out.erase(out.begin());
    }
    return out;
  }

  void visit_function(TSNode n) {
    FunctionRecord rec;
    rec.file = file_.path();
    TSNode name = ts::field(n, "name");
    rec.name = ts::present(name) ? std::string(text(name)) : "<anonymous>";
    rec.qualified_name = join_chain(chain_, rec.name);
    bool method = scope() == ScopeKind::klass;
    rec.kind = !method                 ? FunctionKind::function
               : rec.name == "__init__" ? FunctionKind::constructor
                                        : FunctionKind::method;
    rec.params = parameters(ts::field(n, "parameters"), method);
    if (method && !class_supertypes_.empty()) rec.supertypes = class_supertypes_.back();
    TSNode outer = outer_definition(n);
    rec.body_span = {ts::first_line(outer), ts::last_line(outer)};
    out_.functions.push_back(rec);

    FunctionScope fs;
    fs.record = out_.functions.size() - 1;
    fs.is_init = rec.kind == FunctionKind::constructor;
    fs.owner = method && !class_names_.empty() ? class_names_.back() : std::string();
    functions_.push_back(std::move(fs));
    chain_.push_back(rec.name);
    scopes_.push_back(ScopeKind::function);
    TSNode params = ts::field(n, "parameters");
    if (ts::present(params)) visit(params);  // default values may hold lambdas
    TSNode body = ts::field(n, "body");
    if (ts::present(body)) visit(body);
    scopes_.pop_back();
    chain_.pop_back();
    functions_.pop_back();
  }

  void visit_lambda(TSNode n) {
    FunctionRecord rec;
    rec.file = file_.path();
    rec.name = "lambda@" + std::to_string(ts::first_line(n));
    rec.qualified_name = join_chain(chain_, rec.name);
    rec.kind = FunctionKind::function;
    rec.lambda = true;
    rec.params = parameters(ts::field(n, "parameters"), false);
    rec.body_span = {ts::first_line(n), ts::last_line(n)};
    out_.functions.push_back(std::move(rec));
    TSNode body = ts::field(n, "body");
    if (ts::present(body)) visit(body);
  }

  // Collects names written by an assignment target.
  void targets(TSNode lhs, std::vector<std::pair<std::string, bool>>& names) const {
    auto t = ts::type(lhs);
    if (t == "identifier") {
      names.emplace_back(text(lhs), true);
    } else if (t == "attribute") {
      TSNode object = ts::field(lhs, "object");
      TSNode attr = ts::field(lhs, "attribute");
      if (!ts::present(object) || !ts::present(attr)) return;
      auto receiver = text(object);
      if (receiver == "self" || receiver == "cls" ||
          (ts::type(object) == "identifier" && is_class_like_name(receiver))) {
        names.emplace_back(text(attr), false);
      }
    } else if (t == "subscript") {
      TSNode value = ts::field(lhs, "value");
      if (ts::present(value)) {
        std::vector<std::pair<std::string, bool>> inner;
        targets(value, inner);
        for (auto& [name, plain] : inner) names.emplace_back(name, false);
      }
    } else if (t == "pattern_list" || t == "tuple_pattern" || t == "list_pattern" ||
               t == "tuple" || t == "list" || t == "list_splat_pattern" ||
               t == "parenthesized_expression") {
      for (TSNode c : ts::named_children(lhs)) targets(c, names);
    }
  }

  bool has_decl(const std::string& owner, const std::string& name) const {
    for (const auto& v : out_.variables) {
      if (v.owner == owner && v.name == name) return true;
    }
    return false;
  }

  void visit_assignment(TSNode n) {
    TSNode lhs = ts::field(n, "left");
    if (!ts::present(lhs)) return;
    TSNode stmt = n;
    TSNode parent = ts_node_parent(n);
    if (ts::present(parent) && ts::type(parent) == "expression_statement") stmt = parent;
    LineSpan span{ts::first_line(stmt), ts::last_line(stmt)};
    bool plain_assignment = ts::type(n) == "assignment";

    std::vector<std::pair<std::string, bool>> names;
    targets(lhs, names);

    switch (scope()) {
      case ScopeKind::module:
        if (!plain_assignment) break;
        for (auto& [name, plain] : names) {
          if (plain && !has_decl("", name)) out_.variables.push_back({file_.path(), name, "", span});
        }
        break;
      case ScopeKind::klass:
        if (!plain_assignment || class_names_.empty()) break;
        for (auto& [name, plain] : names) {
          if (plain && !has_decl(class_names_.back(), name)) {
            out_.variables.push_back({file_.path(), name, class_names_.back(), span});
          }
        }
        break;
      case ScopeKind::function: {
        auto& fs = functions_.back();
        if (fs.is_init && plain_assignment && !fs.owner.empty() &&
            ts::type(lhs) == "attribute") {
          TSNode object = ts::field(lhs, "object");
          TSNode attr = ts::field(lhs, "attribute");
          if (ts::present(object) && ts::present(attr) && text(object) == "self") {
            std::string name(text(attr));
            if (!has_decl(fs.owner, name)) out_.variables.push_back({file_.path(), name, fs.owner, span});
          }
        }
        for (auto& [name, plain] : names) {
          // A bare name only reaches module state through a global declaration.
          if (plain && !fs.globals.contains(name)) continue;
          out_.writes.push_back({fs.record, name, ts::first_line(n)});
        }
        break;
      }
    }
  }

  const SourceFile& file_;
  std::string_view src_;
  TSNode root_;
  FileRecords out_;
  std::vector<std::string> chain_;
  std::vector<ScopeKind> scopes_;
  std::vector<FunctionScope> functions_;
  std::vector<std::vector<std::string>> class_supertypes_;
  std::vector<std::string> class_names_;
};

}  // namespace

FileRecords extract_python(const SourceFile& file, const ts::Tree& tree) {
  return PythonExtractor(file, tree).run();
}

}  // namespace agentslice::detail
