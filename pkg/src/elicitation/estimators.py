"""A scikit-learn style wrapper around the design solvers.

``fit`` takes a game instead of a data matrix, so only the parameter
plumbing (``get_params``, ``set_params``, ``clone``) carries over.
"""

from fractions import Fraction

from sklearn.base import BaseEstimator

from .design import MAX_PROFILES, design_value, solve_commitment, solve_transparency_pure
from .exceptions import NonDirectSignal
from .game import GameSpec


class ReceiverDesigner(BaseEstimator):
    """Receiver-optimal direct signal for a game.

    ``mode`` is ``"commitment"`` or ``"transparency"``.
    """

    def __init__(self, mode="commitment", max_profiles=MAX_PROFILES):
        self.mode = mode
        self.max_profiles = max_profiles

    def fit(self, game: GameSpec, prior=None):
        if self.mode == "commitment":
            solver = solve_commitment
        elif self.mode == "transparency":
            solver = solve_transparency_pure
        else:
            raise ValueError(f"mode must be 'commitment' or 'transparency', not {self.mode!r}")
        self.game_ = game
        self.prior_ = game.resolve_prior(prior)
        self.solution_ = solver(game, self.prior_, max_profiles=self.max_profiles)
        self.value_ = self.solution_.value
        self.signal_ = self.solution_.signal
        self.profile_ = self.solution_.profile
        return self

    def _check_fitted(self):
        if not hasattr(self, "solution_"):
            raise AttributeError("call fit first")

    def predict_proba(self, messages):
        """Recommendation distribution ``pi(. | m)`` for each message label."""
        self._check_fitted()
        return [self.signal_.kernel[self.game_.message_index(m)] for m in messages]

    def predict(self, messages):
        """Most likely recommendation per message; ties go to the first action."""
        self._check_fitted()
        if not self.signal_.is_direct_for(self.game_):
            raise NonDirectSignal("fitted signal is not direct")
        out = []
        for row in self.predict_proba(messages):
            top = max(row)
            out.append(self.game_.actions[row.index(top)])
        return out

    def score(self, game=None, prior=None) -> Fraction:
        """Receiver value of the fitted design at ``prior`` (default: the fitted prior)."""
        self._check_fitted()
        game = game or self.game_
        prior = self.prior_ if prior is None else game.resolve_prior(prior)
        return design_value(game, prior, self.profile_, self.signal_)
