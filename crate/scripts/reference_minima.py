"""Offline reference-minimum search for the benchmark constants (scipy).

Differential evolution from several seeds, polished with L-BFGS-B, then a
Nelder-Mead pass around the best point for the problems with irrational minima.
"""
import numpy as np
from scipy.optimize import minimize, differential_evolution
pi=np.pi
def ackley(x): x=np.asarray(x); n=len(x); return -20*np.exp(-0.2*np.sqrt((x**2).sum()/n))-np.exp(np.cos(2*pi*x).sum()/n)+20+np.e
def adjiman(x): return np.cos(x[0])*np.sin(x[1])-x[0]/(x[1]**2+1)
def boha(x): return x[0]**2+2*x[1]**2-0.3*np.cos(3*pi*x[0])-0.4*np.cos(4*pi*x[1])+0.7
def branin(x):
    b=5.1/(4*pi**2); c=5/pi; t=1/(8*pi)
    return (x[1]-b*x[0]**2+c*x[0]-6)**2+10*(1-t)*np.cos(x[0])+10
def bukin(x): return 100*np.sqrt(abs(x[1]-0.01*x[0]**2))+0.01*abs(x[0]+10)
def drop(x): r2=x[0]**2+x[1]**2; return -(1+np.cos(12*np.sqrt(r2)))/(0.5*r2+2)
def egg(x): return -(x[1]+47)*np.sin(np.sqrt(abs(x[1]+x[0]/2+47)))-x[0]*np.sin(np.sqrt(abs(x[0]-(x[1]+47))))
A3=np.array([[3,10,30],[0.1,10,35],[3,10,30],[0.1,10,35]]);P3=1e-4*np.array([[3689,1170,2673],[4699,4387,7470],[1091,8732,5547],[381,5743,8828]])
A6=np.array([[10,3,17,3.5,1.7,8],[0.05,10,17,0.1,8,14],[3,3.5,1.7,10,17,8],[17,8,0.05,10,0.1,14]]);P6=1e-4*np.array([[1312,1696,5569,124,8283,5886],[2329,4135,8307,3736,1004,9991],[2348,1451,3522,2883,3047,6650],[4047,8828,8732,5743,1091,381]])
al=np.array([1,1.2,3,3.2])
def h3(x): return -(al*np.exp(-(A3*(np.asarray(x)-P3)**2).sum(1))).sum()
def h6(x): return -(al*np.exp(-(A6*(np.asarray(x)-P6)**2).sum(1))).sum()
def st(x): x=np.asarray(x); return 0.5*(x**4-16*x**2+5*x).sum()
PROBLEMS=[('adjiman',adjiman,[(-1,2),(-1,1)]),('branin',branin,[(-5,10),(0,15)]),('eggholder',egg,[(-512,512)]*2),('hartman3',h3,[(0,1)]*3),('hartman6',h6,[(0,1)]*6),('styblinskitang',st,[(-5,5)]*5)]
for name,f,b in PROBLEMS:
    best=None
    for s in range(5):
        r=differential_evolution(f,b,seed=s,tol=1e-14,maxiter=5000,polish=True)
        r2=minimize(f,r.x,bounds=b,method='L-BFGS-B',options={'ftol':1e-16,'gtol':1e-14})
        for rr in (r,r2):
            if best is None or rr.fun<best.fun: best=rr
    print(name, repr(float(best.fun)), list(best.x))
print(repr(float(branin([pi,2.275]))), 5/(4*pi))
r=minimize(h3,[0.114614,0.555649,0.852547],method='Nelder-Mead',options={'xatol':1e-13,'fatol':1e-16,'maxiter':100000})
print('h3',repr(float(r.fun)),r.x)
r=minimize(st,[-2.9035]*5,method='Nelder-Mead',options={'xatol':1e-13,'fatol':1e-16,'maxiter':100000})
print('st',repr(float(r.fun)))
r=minimize(lambda y: adjiman([2.0,y[0]]),[0.1057],method='Nelder-Mead',options={'xatol':1e-14,'fatol':1e-17})
print('adj',repr(float(r.fun)))
r=minimize(lambda y: egg([512.0,y[0]]),[404.23],method='Nelder-Mead',options={'xatol':1e-12,'fatol':1e-17})
print('egg',repr(float(r.fun)))
