"""From-scratch reference implementations used as independent test oracles."""
