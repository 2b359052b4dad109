; Start at any version up to 3; an update request bumps the version until
; the last one is reached. The updater may also idle forever.
(system
  (vars (pc Int) (ver Int) (pend Int))
  (init (and (= pc 0) (= pend 0) (>= ver 0) (<= ver 3)))
  (trans
    (rule (= pc 0) ((pend 1) (pc 1)))
    (rule (= pc 0) ())
    (rule (and (= pc 1) (< ver 3)) ((ver (+ ver 1)) (pend 0) (pc 0)))
    (rule (and (= pc 1) (>= ver 3)) ((pend 0) (pc 2)))
    (rule (= pc 2) ())))
