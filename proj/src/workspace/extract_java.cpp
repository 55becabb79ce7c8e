#include <optional>
#include <set>

#include "extract.hpp"

namespace agentslice::detail {

namespace {

struct ClassScope {
  std::string qualified;
  std::vector<std::string> supertypes;
};

struct MethodScope {
  std::size_t record = 0;
  std::set<std::string, std::less<>> locals;
};

bool is_class_like(std::string_view t) {
  return t == "class_declaration" || t == "interface_declaration" || t == "enum_declaration" ||
         t == "record_declaration" || t == "annotation_type_declaration";
}

class JavaExtractor {
 public:
  JavaExtractor(const SourceFile& file, const ts::Tree& tree)
      : file_(file), src_(tree.source()), root_(tree.root()) {}

  FileRecords run() {
    visit(root_);
    return std::move(out_);
  }

 private:
  std::string_view text(TSNode n) const { return ts::text(n, src_); }
  LineSpan span(TSNode n) const { return {ts::first_line(n), ts::last_line(n)}; }

  void visit_children(TSNode n) {
    for (TSNode c : ts::named_children(n)) visit(c);
  }

  void visit(TSNode n) {
    auto t = ts::type(n);
    if (t == "package_declaration") {
      out_.structurals.push_back({file_.path(), span(n), StructuralKind::package});
      return;
    }
    if (t == "import_declaration") {
      out_.structurals.push_back({file_.path(), span(n), StructuralKind::import});
      return;
    }
    if (is_class_like(t)) return visit_class(n);
    if (t == "method_declaration" || t == "constructor_declaration" ||
        t == "compact_constructor_declaration") {
      return visit_method(n);
    }
    if (t == "lambda_expression") return visit_lambda(n);
    if (t == "object_creation_expression") return visit_creation(n);
    if (t == "field_declaration" || t == "constant_declaration") {
      visit_field(n);
      return visit_children(n);
    }
    if (t == "static_initializer") {
      out_.blocks.push_back(span(n));
      return visit_children(n);
    }
    if (t == "block" && ts::present(ts_node_parent(n)) &&
        ts::type(ts_node_parent(n)) == "class_body") {
      out_.blocks.push_back(span(n));  // instance initializer
      return visit_children(n);
    }
    if (t == "local_variable_declaration") {
      declare_locals(n);
      return visit_children(n);
    }
    if (t == "enhanced_for_statement" || t == "catch_formal_parameter" || t == "resource") {
      TSNode name = ts::field(n, "name");
      if (ts::present(name) && !methods_.empty()) methods_.back().locals.emplace(text(name));
      return visit_children(n);
    }
    if (t == "assignment_expression") {
      TSNode lhs = ts::field(n, "left");
      if (ts::present(lhs)) record_write(lhs, ts::first_line(n));
      return visit_children(n);
    }
    if (t == "update_expression") {
      auto operands = ts::named_children(n);
      if (!operands.empty()) record_write(operands.front(), ts::first_line(n));
      return visit_children(n);
    }
    visit_children(n);
  }

  std::vector<std::string> supertypes_of(TSNode n) const {
    std::vector<std::string> out;
    auto add_list = [&](TSNode holder) {
      for (TSNode c : ts::named_children(holder)) {
        if (ts::type(c) == "type_list") {
          for (TSNode ty : ts::named_children(c)) out.emplace_back(text(ty));
        }
      }
    };
    TSNode superclass = ts::field(n, "superclass");
    if (ts::present(superclass)) {
      for (TSNode c : ts::named_children(superclass)) out.emplace_back(text(c));
    }
    TSNode interfaces = ts::field(n, "interfaces");
    if (ts::present(interfaces)) add_list(interfaces);
    for (TSNode c : ts::named_children(n)) {
      if (ts::type(c) == "extends_interfaces") add_list(c);
    }
    return out;
  }

  void enter_class(ClassRecord rec, TSNode body) {
    out_.structurals.push_back({file_.path(), rec.header, StructuralKind::class_header});
    classes_.push_back({rec.qualified_name, rec.supertypes});
    chain_.push_back(rec.name);
    out_.classes.push_back(std::move(rec));
    // Methods of a nested class do not see the enclosing method's locals.
    auto saved = std::move(methods_);
    methods_.clear();
    if (ts::present(body)) visit(body);
    methods_ = std::move(saved);
    chain_.pop_back();
    classes_.pop_back();
  }

  void visit_class(TSNode n) {
    ClassRecord rec;
    rec.file = file_.path();
    TSNode name = ts::field(n, "name");
    rec.name = ts::present(name) ? std::string(text(name)) : "<anonymous>";
    rec.qualified_name = join_chain(chain_, rec.name);
    rec.supertypes = supertypes_of(n);
    rec.span = span(n);
    TSNode body = ts::field(n, "body");
    int header_end = ts::present(body) ? ts::first_line(body) : rec.span.end;
    rec.header = {rec.span.start, std::max(rec.span.start, header_end)};
    enter_class(std::move(rec), body);
  }

  void visit_creation(TSNode n) {
    TSNode body{};
    bool anonymous = false;
    for (TSNode c : ts::named_children(n)) {
      if (ts::type(c) == "class_body") {
        body = c;
        anonymous = true;
      } else {
        visit(c);
      }
    }
    if (!anonymous) return;
    ClassRecord rec;
    rec.file = file_.path();
    rec.name = "anonymous@" + std::to_string(ts::first_line(n));
    rec.qualified_name = join_chain(chain_, rec.name);
    TSNode type = ts::field(n, "type");
    if (ts::present(type)) rec.supertypes.emplace_back(text(type));
    rec.span = span(n);
    rec.header = {rec.span.start, std::max(rec.span.start, ts::first_line(body))};
    // Anonymous bodies are not structural declarations of their own.
    classes_.push_back({rec.qualified_name, rec.supertypes});
    chain_.push_back(rec.name);
    out_.classes.push_back(std::move(rec));
    auto saved = std::move(methods_);
    methods_.clear();
    visit(body);
    methods_ = std::move(saved);
    chain_.pop_back();
    classes_.pop_back();
  }

  Parameter formal_parameter(TSNode p) const {
    Parameter param;
    auto pt = ts::type(p);
    if (pt == "formal_parameter") {
      TSNode name = ts::field(p, "name");
      TSNode type = ts::field(p, "type");
      if (ts::present(name)) param.name = text(name);
      if (ts::present(type)) param.declared_type = text(type);
      TSNode dims = ts::field(p, "dimensions");
      if (ts::present(dims)) param.declared_type += text(dims);
    } else if (pt == "spread_parameter") {
      for (TSNode c : ts::named_children(p)) {
        auto ct = ts::type(c);
        if (ct == "variable_declarator") {
          TSNode name = ts::field(c, "name");
          if (ts::present(name)) param.name = text(name);
        } else if (ct != "modifiers" && param.declared_type.empty()) {
          param.declared_type = std::string(text(c)) + "...";
        }
      }
    } else if (pt == "identifier") {
      param.name = text(p);
    }
    return param;
  }

  std::vector<Parameter> parameters(TSNode params) const {
    std::vector<Parameter> out;
    if (!ts::present(params)) return out;
    auto pt = ts::type(params);
    if (pt == "identifier") {
      out.push_back({std::string(text(params)), ""});
      return out;
    }
    for (TSNode p : ts::named_children(params)) {
      auto t = ts::type(p);
      if (t == "formal_parameter" || t == "spread_parameter" || t == "identifier") {
        out.push_back(formal_parameter(p));
      }
    }
    return out;
  }

  void visit_method(TSNode n) {
    FunctionRecord rec;
    rec.file = file_.path();
    TSNode name = ts::field(n, "name");
    rec.name = ts::present(name) ? std::string(text(name)) : "<anonymous>";
    rec.qualified_name = join_chain(chain_, rec.name);
    bool in_class = !classes_.empty();
    rec.kind = ts::type(n) == "method_declaration"
                   ? (in_class ? FunctionKind::method : FunctionKind::function)
                   : FunctionKind::constructor;
    rec.params = parameters(ts::field(n, "parameters"));
    if (in_class) rec.supertypes = classes_.back().supertypes;
    rec.body_span = span(n);
    out_.functions.push_back(rec);

    MethodScope scope;
    scope.record = out_.functions.size() - 1;
    for (const auto& p : rec.params) scope.locals.insert(p.name);
    methods_.push_back(std::move(scope));
    chain_.push_back(rec.name);
    TSNode body = ts::field(n, "body");
    if (ts::present(body)) visit(body);
    chain_.pop_back();
    methods_.pop_back();
  }

  void visit_lambda(TSNode n) {
    FunctionRecord rec;
    rec.file = file_.path();
    rec.name = "lambda@" + std::to_string(ts::first_line(n));
    rec.qualified_name = join_chain(chain_, rec.name);
    rec.kind = FunctionKind::function;
    rec.lambda = true;
    TSNode params = ts::field(n, "parameters");
    if (ts::present(params) && ts::type(params) == "inferred_parameters") {
      for (TSNode c : ts::named_children(params)) rec.params.push_back({std::string(text(c)), ""});
    } else {
      rec.params = parameters(params);
    }
    rec.body_span = span(n);
    if (!methods_.empty()) {
      for (const auto& p : rec.params) methods_.back().locals.insert(p.name);
    }
    out_.functions.push_back(std::move(rec));
    TSNode body = ts::field(n, "body");
    if (ts::present(body)) visit(body);
  }

  void visit_field(TSNode n) {
    if (classes_.empty()) return;
    for (TSNode c : ts::named_children(n)) {
      if (ts::type(c) != "variable_declarator") continue;
      TSNode name = ts::field(c, "name");
      if (!ts::present(name)) continue;
      out_.variables.push_back({file_.path(), std::string(text(name)), classes_.back().qualified, span(n)});
    }
  }

  void declare_locals(TSNode n) {
    if (methods_.empty()) return;
    for (TSNode c : ts::named_children(n)) {
      if (ts::type(c) != "variable_declarator") continue;
      TSNode name = ts::field(c, "name");
      if (ts::present(name)) methods_.back().locals.emplace(text(name));
    }
  }

  // Resolves an assignment target to the written simple name, if it can
  // denote a field: `x`, `this.x`, `Type.x`, `x[i]`.
  std::optional<std::string> target_name(TSNode lhs, bool& plain) const {
    auto t = ts::type(lhs);
    if (t == "identifier") {
      plain = true;
      return std::string(text(lhs));
    }
    if (t == "field_access") {
      TSNode object = ts::field(lhs, "object");
      TSNode field = ts::field(lhs, "field");
      if (!ts::present(object) || !ts::present(field)) return std::nullopt;
      auto ot = ts::type(object);
      if (ot == "this" || ot == "super" ||
          (ot == "identifier" && is_class_like_name(text(object)))) {
        plain = false;
        return std::string(text(field));
      }
      return std::nullopt;
    }
    if (t == "array_access") {
      TSNode array = ts::field(lhs, "array");
      if (!ts::present(array)) return std::nullopt;
      bool inner_plain = false;
      auto name = target_name(array, inner_plain);
      plain = inner_plain;
      return name;
    }
    if (t == "parenthesized_expression") {
      auto inner = ts::named_children(lhs);
      if (!inner.empty()) return target_name(inner.front(), plain);
    }
    return std::nullopt;
  }

  void record_write(TSNode lhs, int line) {
    if (methods_.empty()) return;
    bool plain = false;
    auto name = target_name(lhs, plain);
    if (!name) return;
    const auto& scope = methods_.back();
    if (plain && scope.locals.contains(*name)) return;
    out_.writes.push_back({scope.record, *name, line});
  }

  const SourceFile& file_;
  std::string_view src_;
  TSNode root_;
  FileRecords out_;
  std::vector<std::string> chain_;
  std::vector<ClassScope> classes_;
  std::vector<MethodScope> methods_;
};

}  // namespace

FileRecords extract_java(const SourceFile& file, const ts::Tree& tree) {
  return JavaExtractor(file, tree).run();
}

}  // namespace agentslice::detail
