//! Annotation processors that re-check compiled predicates inside javac.

use std::fmt::Write;

use super::{unit_path, GeneratedUnit};
use crate::compiler::{ConstraintIR, ElementTest, NamedPredicate, Polarity, Predicate};
use crate::model::Visibility;
use crate::syntax::ast::{AnnotationDef, TargetType};

fn element_kind(t: TargetType) -> &'static str {
    match t {
        TargetType::Class => "CLASS",
        TargetType::Interface => "INTERFACE",
        TargetType::Annotation => "ANNOTATION_TYPE",
        TargetType::Enum => "ENUM",
        TargetType::Field => "FIELD",
        TargetType::Method => "METHOD",
        TargetType::Constructor => "CONSTRUCTOR",
    }
}

fn kind(var: &str, t: TargetType) -> String {
    format!("isKind({var}, ElementKind.{})", element_kind(t))
}

fn has_ann(var: &str, ann: &str) -> String {
    format!("hasAnnotation({var}, \"{ann}\")")
}

fn test(var: &str, d: &ElementTest) -> String {
    let mut parts = Vec::new();
    if let Some(t) = d.target {
        parts.push(kind(var, t));
    }
    match d.mods.visibility {
        Some(Visibility::Package) => parts.push(format!("isPackagePrivate({var})")),
        Some(v) => parts.push(format!("hasModifier({var}, Modifier.{})", v.keyword().to_uppercase())),
        None => {}
    }
    match d.mods.is_abstract {
        Some(true) => parts.push(format!("isAbstract({var})")),
        Some(false) => parts.push(format!("!isAbstract({var})")),
        None => {}
    }
    for (flag, word) in [(d.mods.is_static, "STATIC"), (d.mods.is_final, "FINAL")] {
        match flag {
            Some(true) => parts.push(format!("hasModifier({var}, Modifier.{word})")),
            Some(false) => parts.push(format!("!hasModifier({var}, Modifier.{word})")),
            None => {}
        }
    }
    if let Some(a) = &d.co_ann {
        parts.push(has_ann(var, a));
    }
    if parts.is_empty() {
        "true".to_string()
    } else {
        parts.join(" && ")
    }
}

/// Indented line sink.
struct Out {
    text: String,
    depth: usize,
}

impl Out {
    fn line(&mut self, s: &str) {
        for _ in 0..self.depth {
            self.text.push_str("    ");
        }
        self.text.push_str(s);
        self.text.push('\n');
    }

    fn open(&mut self) {
        self.line("{");
        self.depth += 1;
    }

    fn close(&mut self) {
        self.depth -= 1;
        self.line("}");
    }

    /// `if (cond) { target = value; }` over the enclosed members.
    fn member_loop(&mut self, cond: &str, assign: &str) {
        self.line("for (Element member : elt.getEnclosedElements())");
        self.open();
        self.line(&format!("if ({cond})"));
        self.open();
        self.line(assign);
        self.close();
        self.close();
    }
}

fn check_block(out: &mut Out, p: &NamedPredicate) {
    out.line(&format!("// check: {}", p.name));
    let guard = match &p.predicate {
        Predicate::TargetCondition { disjuncts } if disjuncts.iter().all(|d| d.target.is_some()) => {
            let mut types: Vec<TargetType> = Vec::new();
            for t in disjuncts.iter().filter_map(|d| d.target) {
                if !types.contains(&t) {
                    types.push(t);
                }
            }
            let alts: Vec<String> = types.iter().map(|&t| kind("elt", t)).collect();
            Some(alts.join(" || "))
        }
        Predicate::SameElementCoOccurrence { scope: Some(s), .. }
        | Predicate::MemberExists { scope: s, .. }
        | Predicate::MemberForAll { scope: s, .. }
        | Predicate::MemberForbidden { scope: s, .. }
        | Predicate::OwnerCondition { scope: s, .. } => Some(kind("elt", *s)),
        _ => None,
    };
    match guard {
        Some(g) if g.contains(" || ") => out.line(&format!("if (ok && ({g}))")),
        Some(g) => out.line(&format!("if (ok && {g})")),
        None => out.line("if (ok)"),
    }
    out.open();
    match &p.predicate {
        Predicate::TargetCondition { disjuncts } => {
            out.line("boolean holds = false;");
            for d in disjuncts {
                out.line(&format!("holds = holds || ({});", test("elt", d)));
            }
        }
        Predicate::ForbiddenTargetCondition { conjuncts } => {
            out.line("boolean matched = true;");
            for c in conjuncts {
                out.line(&format!("matched = matched && ({});", test("elt", c)));
            }
            out.line("boolean holds = !matched;");
        }
        Predicate::SameElementCoOccurrence { anns, polarity, .. } => match polarity {
            Polarity::Require => {
                out.line("boolean holds = false;");
                for a in anns {
                    out.line(&format!("holds = holds || {};", has_ann("elt", a)));
                }
            }
            Polarity::Forbid => {
                out.line("boolean matched = true;");
                for a in anns {
                    out.line(&format!("matched = matched && {};", has_ann("elt", a)));
                }
                out.line("boolean holds = !matched;");
            }
        },
        Predicate::MemberExists { disjuncts, .. } => {
            out.line("boolean holds = false;");
            for d in disjuncts {
                match (&d.target, &d.co_ann) {
                    (None, Some(a)) => out.line(&format!("holds = holds || {};", has_ann("elt", a))),
                    _ => out.member_loop(&test("member", d), "holds = true;"),
                }
            }
        }
        Predicate::MemberForAll { disjuncts, .. } => {
            out.line("boolean holds = false;");
            for d in disjuncts {
                match d.target {
                    None => out.line(&format!("holds = holds || {};", test("elt", d))),
                    Some(t) => {
                        out.open();
                        out.line("boolean every = true;");
                        out.member_loop(&format!("{} && !({})", kind("member", t), test("member", d)), "every = false;");
                        out.line("holds = holds || every;");
                        out.close();
                    }
                }
            }
        }
        Predicate::MemberForbidden { conjuncts, .. } => {
            out.line("boolean matched = true;");
            for d in conjuncts {
                match (&d.target, &d.co_ann) {
                    (None, Some(a)) => out.line(&format!("matched = matched && {};", has_ann("elt", a))),
                    _ => {
                        out.open();
                        out.line("boolean found = false;");
                        out.member_loop(&test("member", d), "found = true;");
                        out.line("matched = matched && found;");
                        out.close();
                    }
                }
            }
            out.line("boolean holds = !matched;");
        }
        Predicate::OwnerCondition { tests, polarity, .. } => {
            out.line("Element owner = elt.getEnclosingElement();");
            let conds: Vec<String> =
                tests.iter().map(|d| if d.is_bare() { test("elt", d) } else { test("owner", d) }).collect();
            match polarity {
                Polarity::Require => {
                    out.line("boolean holds = false;");
                    for c in conds {
                        out.line(&format!("holds = holds || ({c});"));
                    }
                }
                Polarity::Forbid => {
                    out.line("boolean matched = true;");
                    for c in conds {
                        out.line(&format!("matched = matched && ({c});"));
                    }
                    out.line("boolean holds = !matched;");
                }
            }
        }
    }
    out.line("if (!holds)");
    out.open();
    out.line("ok = false;");
    out.close();
    out.close();
}

const HELPERS: &[(&str, &str)] = &[
    (
        "isKind(",
        "    private static boolean isKind(Element e, ElementKind kind)
    {
        return e.getKind() == kind;
    }
",
    ),
    (
        "hasModifier(",
        "    private static boolean hasModifier(Element e, Modifier modifier)
    {
        return e.getModifiers().contains(modifier);
    }
",
    ),
    (
        "isPackagePrivate(",
        "    private static boolean isPackagePrivate(Element e)
    {
        Set<Modifier> modifiers = e.getModifiers();
        return !modifiers.contains(Modifier.PUBLIC)
            && !modifiers.contains(Modifier.PROTECTED)
            && !modifiers.contains(Modifier.PRIVATE);
    }
",
    ),
    (
        "isAbstract(",
        "    private static boolean isAbstract(Element e)
    {
        return e.getModifiers().contains(Modifier.ABSTRACT)
            || e.getKind() == ElementKind.INTERFACE
            || e.getKind() == ElementKind.ANNOTATION_TYPE;
    }
",
    ),
    (
        "hasAnnotation(",
        "    private static boolean hasAnnotation(Element e, String name)
    {
        for (AnnotationMirror mirror : e.getAnnotationMirrors())
        {
            if (mirror.getAnnotationType().asElement().getSimpleName().contentEquals(name))
            {
                return true;
            }
        }
        return false;
    }
",
    ),
];

fn processor(name: &str, package: &str, class: &str, preds: &[&NamedPredicate]) -> String {
    let mut body = Out { text: String::new(), depth: 3 };
    for (i, p) in preds.iter().enumerate() {
        if i > 0 {
            body.text.push('\n');
        }
        check_block(&mut body, p);
    }
    let helpers: Vec<&str> = HELPERS.iter().filter(|(k, _)| body.text.contains(k)).map(|(_, h)| *h).collect();

    let mut imports = vec![
        "java.util.Set",
        "javax.annotation.processing.AbstractProcessor",
        "javax.annotation.processing.RoundEnvironment",
        "javax.annotation.processing.SupportedAnnotationTypes",
        "javax.annotation.processing.SupportedSourceVersion",
        "javax.lang.model.SourceVersion",
        "javax.lang.model.element.Element",
        "javax.lang.model.element.TypeElement",
        "javax.tools.Diagnostic.Kind",
    ];
    let all = helpers.concat() + &body.text;
    if all.contains("AnnotationMirror") {
        imports.push("javax.lang.model.element.AnnotationMirror");
    }
    if all.contains("ElementKind") {
        imports.push("javax.lang.model.element.ElementKind");
    }
    if all.contains("Modifier") {
        imports.push("javax.lang.model.element.Modifier");
    }
    imports.sort();

    let mut s = String::new();
    let _ = writeln!(s, "package {package};\n");
    for i in imports {
        let _ = writeln!(s, "import {i};");
    }
    let _ = write!(
        s,
        "
@SupportedAnnotationTypes(\"{package}.{name}\")
@SupportedSourceVersion(SourceVersion.RELEASE_6)
public class {class} extends AbstractProcessor
{{
    @Override
    public boolean process(Set<? extends TypeElement> annotations,
                           RoundEnvironment objects)
    {{
        for (Element elt : objects.getElementsAnnotatedWith({name}.class))
        {{
            boolean ok = true;

{body}
            if (!ok)
            {{
                this.processingEnv.getMessager().printMessage
                (
                    Kind.ERROR,
                    \"The annotation @{name} is disallowed for this location.\",
                    elt
                );
            }}
        }}
        return true;
    }}
",
        body = body.text
    );
    for h in helpers {
        s.push('\n');
        s.push_str(h);
    }
    s.push_str("}\n");
    s
}

/// Up to two processors: one for require predicates, one for forbid ones.
pub fn gen_processors(def: &AnnotationDef, ir: &ConstraintIR, package: &str) -> Vec<GeneratedUnit> {
    let Some(a) = ir.get(&def.name) else { return Vec::new() };
    let mut out = Vec::new();
    for (polarity, suffix) in [(Polarity::Require, "RequireProcessor"), (Polarity::Forbid, "ForbidProcessor")] {
        let preds: Vec<&NamedPredicate> = a.predicates.iter().filter(|p| p.predicate.polarity() == polarity).collect();
        if preds.is_empty() {
            continue;
        }
        let class = format!("{}{suffix}", def.name);
        out.push(GeneratedUnit {
            relative_path: unit_path(package, &class),
            contents: processor(&def.name, package, &class, &preds),
        });
    }
    out
}
