"""
Concrete syntax of rule files (.fzr).

Precedence from tight to loose: ! & | ->. The implication is right
associative, quantifier bodies extend as far right as possible. A
quantifier may stand as the last operand of any connective, e.g.

    forall p in P: (eye(p) | arm(p)) -> exists q in P: person(q) & closeby(p, q, sigma=0)

The LALR table resolves the resulting shift/reduce conflicts as shift,
which is exactly the maximal-body reading.
"""

RULE_GRAMMAR = r"""
?start: formula

?formula: quant
        | implication

?quant: forall
      | exists

forall: "forall" NAME "in" NAME ":" formula
exists: "exists" NAME "in" NAME ":" formula

?implication: disjunction
            | disjunction IMPLIES formula -> implication

?disjunction: conjunction
            | disjunction "|" conjunction -> disjunction
            | disjunction "|" quant -> disjunction

?conjunction: unary
            | conjunction "&" unary -> conjunction
            | conjunction "&" quant -> conjunction

?unary: atom
      | "!" unary -> negation
      | "!" quant -> negation

?atom: application
     | membership
     | "(" formula ")"

application: NAME "(" [arg ("," arg)*] ")"
membership: NAME "in" NAME

arg: NAME -> var_arg
   | NAME "=" NUMBER -> named_arg

IMPLIES: /->(\[[SR]\])?/
NAME: /[A-Za-z_][A-Za-z0-9_]*/

COMMENT: /#[^\n]*/

%import common.NUMBER
%import common.WS
%ignore WS
%ignore COMMENT
"""
