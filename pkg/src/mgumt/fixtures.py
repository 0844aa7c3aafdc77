"""Shipped grammars and scripts.

`table_one()` is the hand-crafted expert lexicon for "the mouse eats cheese"
with case and inflection movement.  `teaching_gold()` extends it with the
nouns and number morphology the teaching session needs (rat, rats, carrot,
mice, and subject/verb agreement through split nominative case); the
extensions are fixture content, built in the same style.
"""

from .grammar import Lexicon, load_lexicon

TABLE_ONE = """\
mouse\t::\tn\tmouse
cheese\t::\tn -k\tcheese
the\t::\t=n d -k\teps
eat\t::\t=n v -f\t\\x.\\y.eat(x)(y)
-s\t::\t=pred +f +k t\teps
eps\t::\t=v +k =d pred\t\\P.\\Q.Q(P)
eps\t::\t=t c\teps
"""

# Number-aware extension: singular subjects carry -ksg, plural subjects -kpl,
# and the two inflection entries select one each, so "the rats eats carrot"
# has no derivation while "the rats eat cheese" does.  Object nouns keep the
# neutral -k of the original grammar.
TEACHING_GOLD = """\
mouse\t::\tnsg\tmouse
rat\t::\tnsg\trat
rats\t::\tnpl\trats
mice\t::\tnpl\tmice
cheese\t::\tn -k\tcheese
carrot\t::\tn -k\tcarrot
the\t::\t=nsg d -ksg\teps
the\t::\t=npl d -kpl\teps
eat\t::\t=n v -f\t\\x.\\y.eat(x)(y)
-s\t::\t=pred +f +ksg t\teps
eps\t::\t=pred +f +kpl t\teps
eps\t::\t=v +k =d pred\t\\P.\\Q.Q(P)
eps\t::\t=t c\teps
"""

# The four-iteration teaching session, with production probes after each
# point the learner has something new to say.  The final teach introduces the
# suppletive plural.
SESSION_SCRIPT = """\
teach\tthe mouse eats cheese\teat(cheese)(mouse)
teach\tthe rat eats cheese\teat(cheese)(rat)
probe\teat(cheese)(rat)
expect\tendorse
teach\tthe mouse eats carrot\teat(carrot)(mouse)
probe\teat(carrot)(rat)
expect\tendorse
teach\tthe rats eat cheese\teat(cheese)(rats)
probe\teat(carrot)(rats)
expect\treject
teach\tthe mice eat cheese\teat(cheese)(mice)
"""


def table_one() -> Lexicon:
    return load_lexicon(TABLE_ONE)


def teaching_gold() -> Lexicon:
    return load_lexicon(TEACHING_GOLD)
