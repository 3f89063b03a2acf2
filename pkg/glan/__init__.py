# Global-local attention network for rumor detection
