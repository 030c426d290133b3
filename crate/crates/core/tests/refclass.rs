mod common;

use common::{doubles, error, logicals, strings};

const ACCOUNT: &str = r#"
Account <- set_ref_class("Account",
  fields = list(owner = field("character", read_only = TRUE), balance = "numeric", history = "numeric",
                doubled = active(function() 2 * balance)),
  methods = list(
    deposit = function(x) {
      balance <<- balance + x
      history <<- c(history, x)
      invisible(.self)
    },
    describe = function() paste(owner, balance)
  ))
a <- Account$new(owner = "ann", balance = 10)
"#;

const POP: &str = include_str!("../../../corpus/simplepop.mls");

fn with_account(rest: &str) -> String {
    format!("{ACCOUNT}{rest}")
}

#[test]
fn aliases_see_each_others_mutations() {
    assert_eq!(doubles(&with_account("b <- a\nb$deposit(5)\na$balance")), [15.0]);
    assert_eq!(doubles(&with_account("b <- a\na$balance <- 1\nb$balance")), [1.0]);
    assert_eq!(doubles(&with_account("f <- function(acc) acc$deposit(2)\nf(a)\na$balance")), [12.0]);
}

#[test]
fn read_only_fields_reject_assignment() {
    let e = error(&with_account("a$owner <- \"bob\""));
    assert!(e.contains("read-only"), "{e}");
    assert_eq!(strings(&with_account("a$owner")), ["ann"]);
    let e = error(&format!("{POP}\np <- SimplePop$new(birth = 0.08, death = 0.1, size = 100)\np$birth <- 0.5"));
    assert!(e.contains("read-only"), "{e}");
}

#[test]
fn copies_are_independent() {
    let src = with_account("c2 <- copy(a)\nc2$deposit(100)\nc(a$balance, c2$balance)");
    assert_eq!(doubles(&src), [10.0, 110.0]);
    assert_eq!(strings(&with_account("copy(a)$owner")), ["ann"]);
    assert_eq!(doubles(&with_account("c2 <- copy(a)\nc2$balance <- 4\nc2$doubled")), [8.0]);
    let pop = format!("{POP}\nset_seed(1)\np <- SimplePop$new(birth = 0.08, death = 0.1, size = 100)\nr <- copy(p)\np$evolve()\nlength(r$size)");
    assert_eq!(doubles(&pop), [1.0]);
}

#[test]
fn ordinary_field_values_keep_value_semantics() {
    assert_eq!(doubles(&with_account("a$history <- c(1, 2, 3)\nh <- a$history\nh[1] <- 99\na$history")), [1.0, 2.0, 3.0]);
    let src = with_account("a$history <- c(1, 2, 3)\nf <- function(v) { v[2] <- 0; sum(v) }\ns <- f(a$history)\nc(s, a$history)");
    assert_eq!(doubles(&src), [4.0, 1.0, 2.0, 3.0]);
}

#[test]
fn instances_have_distinct_identities() {
    let src = with_account("b <- Account$new(owner = \"bo\", balance = 1)\nb$deposit(1)\nc(a$balance, b$balance)");
    assert_eq!(doubles(&src), [10.0, 2.0]);
}

#[test]
fn active_fields_track_their_source() {
    assert_eq!(doubles(&with_account("a$deposit(1)\na$doubled")), [22.0]);
}

#[test]
fn methods_see_fields_by_name() {
    assert_eq!(strings(&with_account("a$describe()")), ["ann 10"]);
}

#[test]
fn construction_and_field_errors() {
    assert!(error(&format!("{POP}\nSimplePop$new(birth = \"x\")")).contains("numeric"));
    assert!(error(&with_account("Account$new(nickname = \"z\")")).contains("nickname"));
    assert!(error(&with_account("a$nickname")).contains("nickname"));
    assert!(error(&with_account("a$balance <- \"lots\"")).contains("numeric"));
    assert!(error(&with_account("a$withdraw(1)")).contains("withdraw"));
}

#[test]
fn definition_errors() {
    let clash = "set_ref_class(\"P\", fields = list(size = \"numeric\"), methods = list(size = function() 1))";
    assert!(error(clash).contains("size"));
    let plain = "set_class(\"Plain\")\nset_ref_class(\"R\", contains = \"Plain\")";
    assert!(error(plain).contains("not a reference class"));
    let redeclared = "set_ref_class(\"P\", fields = list(n = \"numeric\"))\nset_ref_class(\"Q\", fields = list(n = \"numeric\"), contains = \"P\")";
    assert!(error(redeclared).contains("already defined"));
}

#[test]
fn subclasses_inherit_and_override() {
    let src = r#"
Base <- set_ref_class("Base", fields = list(n = "numeric"), methods = list(
  hello = function() "base", bump = function() n <<- n + 1))
Child <- set_ref_class("Child", contains = "Base", methods = list(hello = function() "child"))
k <- Child$new(n = 1)
k$bump()
c(k$hello(), as.character(k$n))
"#;
    assert_eq!(strings(src), ["child", "2"]);
    assert_eq!(logicals("Base <- set_ref_class(\"Base\")\nChild <- set_ref_class(\"Child\", contains = \"Base\")\nis(Child$new(), \"Base\")"), [true]);
}

#[test]
fn evolve_appends_one_generation() {
    let src = format!("{POP}\nset_seed(7)\np <- SimplePop$new(birth = 0.08, death = 0.1, size = 100)\nresult <- p$evolve()\nc(length(p$size), p$size[1])");
    assert_eq!(doubles(&src), [2.0, 100.0]);
}
